//! Binary contact path process on a torus.
//!
//! Each spin `zeta(x) >= 0` jumps to 0 at rate 1 and to `zeta(x) + zeta(y)` at
//! rate `lambda / 2d` for each neighbor `y`; between jumps every spin follows
//! `d zeta / dt = (1 - lambda) zeta`. Started from all ones, the support
//! `{x : zeta(x) > 0}` is the contact process started from full occupancy when
//! both are driven by the same events.
//!
//! The decay is applied lazily: a spin stores its value at the time of the
//! last jump that touched it and is scaled by `exp((1 - lambda) dt)` on read.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contact::{ContactParams, SparseConfig};
use crate::lattice::{CanonicalVertex, Geometry, Torus, Vertex};
use crate::rng::substream;
use crate::stats::MeanVar;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct BcppField {
    torus: Torus,
    lambda: f64,
    values: Vec<f64>,
    last_update: Vec<f64>,
    time: f64,
    underflows: u64,
}

impl BcppField {
    pub fn all_ones(torus: Torus, lambda: f64) -> Self {
        let n = torus.volume();
        BcppField {
            torus,
            lambda,
            values: vec![1.0; n],
            last_update: vec![0.0; n],
            time: 0.0,
            underflows: 0,
        }
    }

    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Advance the clock without events (pure decay).
    pub fn advance_to(&mut self, t: f64) {
        assert!(t >= self.time, "time runs forward");
        self.time = t;
    }

    /// `zeta(x)` at the current time.
    #[inline]
    pub fn value(&self, index: usize) -> f64 {
        self.value_at(index, self.time)
    }

    #[inline]
    fn value_at(&self, index: usize, t: f64) -> f64 {
        let stored = self.values[index];
        if stored == 0.0 || self.lambda == 1.0 {
            return stored;
        }
        stored * ((1.0 - self.lambda) * (t - self.last_update[index])).exp()
    }

    /// Exact positivity: decay never reaches zero, only recoveries do.
    #[inline]
    pub fn is_positive(&self, index: usize) -> bool {
        self.values[index] > 0.0
    }

    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }

    /// Reads that underflowed to zero and were floored at the smallest
    /// positive normal float.
    pub fn underflows(&self) -> u64 {
        self.underflows
    }

    fn recover(&mut self, x: usize) {
        self.values[x] = 0.0;
        self.last_update[x] = self.time;
    }

    fn absorb(&mut self, x: usize, y: usize) {
        let mut sum = self.value(x) + self.value(y);
        if sum == 0.0 && (self.is_positive(x) || self.is_positive(y)) {
            self.underflows += 1;
            sum = f64::MIN_POSITIVE;
        }
        self.values[x] = sum;
        self.last_update[x] = self.time;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BcppEvent {
    /// `zeta(site) <- 0`.
    Recovery { site: usize },
    /// `zeta(site) <- zeta(site) + zeta(from)`.
    Absorb { site: usize, from: usize },
}

fn torus_of(params: &ContactParams) -> Result<Torus> {
    match params.geometry() {
        Geometry::Torus(t) => Ok(*t),
        Geometry::Lattice { .. } => Err(Error::usage(
            "the binary contact path process runs on a torus (all-ones start needs finite volume)",
        )),
    }
}

fn check_field(field: &BcppField, params: &ContactParams) -> Result<()> {
    let torus = torus_of(params)?;
    if torus != field.torus || params.lambda() != field.lambda {
        return Err(Error::usage("field and parameters disagree on torus or lambda"));
    }
    Ok(())
}

/// Draw the next event time and event type.
fn draw_event<R: Rng + ?Sized>(torus: &Torus, lambda: f64, rng: &mut R) -> (f64, BcppEvent) {
    let n = torus.volume();
    let wait = rng.sample::<f64, _>(Exp1) / (n as f64 * (1.0 + lambda));
    let site = rng.random_range(0..n);
    let event = if rng.random::<f64>() * (1.0 + lambda) < 1.0 {
        BcppEvent::Recovery { site }
    } else {
        let k = rng.random_range(0..2 * torus.dim());
        BcppEvent::Absorb { site, from: torus.neighbor_index(site, k) }
    };
    (wait, event)
}

fn apply(field: &mut BcppField, event: BcppEvent) {
    match event {
        BcppEvent::Recovery { site } => field.recover(site),
        BcppEvent::Absorb { site, from } => field.absorb(site, from),
    }
}

/// One jump of the process, preceded by the decay flow up to the jump time.
pub fn bcpp_step<R: Rng + ?Sized>(
    field: &mut BcppField,
    params: &ContactParams,
    rng: &mut R,
) -> Result<BcppEvent> {
    check_field(field, params)?;
    let (wait, event) = draw_event(&field.torus, field.lambda, rng);
    field.time += wait;
    apply(field, event);
    Ok(event)
}

/// Run jumps up to time `t` and leave the field's clock at `t`.
pub fn run_until<R: Rng + ?Sized>(
    field: &mut BcppField,
    params: &ContactParams,
    t: f64,
    rng: &mut R,
) -> Result<u64> {
    check_field(field, params)?;
    let mut events = 0;
    loop {
        let (wait, event) = draw_event(&field.torus, field.lambda, rng);
        if field.time + wait > t {
            break;
        }
        field.time += wait;
        apply(field, event);
        events += 1;
    }
    field.advance_to(t);
    Ok(events)
}

/// The binary contact path process and the contact process from full
/// occupancy, driven by one event stream.
#[derive(Debug, Clone)]
pub struct CoupledPair {
    pub bcpp: BcppField,
    pub contact: SparseConfig,
}

impl CoupledPair {
    pub fn new(params: &ContactParams) -> Result<Self> {
        let torus = torus_of(params)?;
        Ok(CoupledPair {
            bcpp: BcppField::all_ones(torus, params.lambda()),
            contact: (0..torus.volume()).map(|i| torus.vertex_at(i)).collect(),
        })
    }

    /// Apply one shared event. The contact process infects `site` exactly
    /// when the neighbor it would absorb from is infected.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> BcppEvent {
        let torus = self.bcpp.torus;
        let (wait, event) = draw_event(&torus, self.bcpp.lambda, rng);
        self.bcpp.time += wait;
        apply(&mut self.bcpp, event);
        match event {
            BcppEvent::Recovery { site } => {
                self.contact.remove(&torus.vertex_at(site));
            }
            BcppEvent::Absorb { site, from } => {
                if self.contact.contains(&torus.vertex_at(from)) {
                    self.contact.insert(torus.vertex_at(site));
                }
            }
        }
        event
    }

    /// Sites where `zeta > 0` and contact occupation disagree.
    pub fn support_mismatches(&self) -> usize {
        let torus = self.bcpp.torus;
        (0..torus.volume())
            .filter(|&i| self.bcpp.is_positive(i) != self.contact.contains(&torus.vertex_at(i)))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledRun {
    pub events: u64,
    /// `(time, support size)` after each checkpoint.
    pub checkpoints: Vec<(f64, usize)>,
}

/// Drive a coupled pair to `horizon`, comparing the full supports after every
/// event and recording `n_checkpoints` evenly spaced snapshots.
pub fn run_coupled(params: &ContactParams, horizon: f64, n_checkpoints: usize, seed: u64) -> Result<CoupledRun> {
    if !(horizon >= 0.0) {
        return Err(Error::usage("horizon must be >= 0"));
    }
    let mut pair = CoupledPair::new(params)?;
    let mut rng = substream(seed, 0);
    let check = |pair: &CoupledPair, events: u64| match pair.support_mismatches() {
        0 => Ok(()),
        m => Err(Error::InvariantViolation(format!(
            "{m} sites differ between zeta > 0 and the contact process after event {events} (t = {})",
            pair.bcpp.time
        ))),
    };
    check(&pair, 0)?;
    let mut checkpoints = Vec::with_capacity(n_checkpoints);
    let marks: Vec<f64> = (1..=n_checkpoints)
        .map(|i| horizon * i as f64 / n_checkpoints as f64)
        .collect();
    let mut next_mark = 0;
    let mut events = 0;
    loop {
        let mut probe = rng.clone();
        let (wait, _) = draw_event(&pair.bcpp.torus, pair.bcpp.lambda, &mut probe);
        let next_time = pair.bcpp.time + wait;
        while next_mark < marks.len() && marks[next_mark] < next_time {
            checkpoints.push((marks[next_mark], pair.bcpp.support_size()));
            next_mark += 1;
        }
        if next_time > horizon {
            break;
        }
        pair.step(&mut rng);
        events += 1;
        check(&pair, events)?;
    }
    pair.bcpp.advance_to(horizon);
    Ok(CoupledRun { events, checkpoints })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n_trials: u64,
}

impl From<MeanVar> for MomentEstimate {
    fn from(m: MeanVar) -> Self {
        MomentEstimate { mean: m.mean(), std_err: m.std_err(), n_trials: m.count() }
    }
}

/// Monte Carlo mean of `zeta_t(O)` from the all-ones start.
pub fn first_moment_check(params: &ContactParams, t: f64, n_trials: u64, seed: u64) -> Result<MomentEstimate> {
    let torus = torus_of(params)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::usage("time must be finite and >= 0"));
    }
    if n_trials == 0 {
        return Err(Error::usage("n_trials must be >= 1"));
    }
    let acc = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut field = BcppField::all_ones(torus, params.lambda());
            run_until(&mut field, params, t, &mut substream(seed, i))?;
            Ok(field.value(0))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .collect::<MeanVar>();
    Ok(acc.into())
}

/// Lattice vectors in the hyperoctahedral orbit of `class`.
pub fn orbit(class: &CanonicalVertex) -> Vec<Vertex> {
    let d = class.dim();
    let mut perm: Vec<usize> = (0..d).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    loop {
        for signs in 0u32..(1 << d) {
            let coords = (0..d).map(|i| {
                let a = class.values()[perm[i]] as i32;
                if signs >> i & 1 == 1 {
                    -a
                } else {
                    a
                }
            });
            let v = Vertex::new(coords).expect("dimension >= 1");
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Monte Carlo estimate of `E[zeta_t(O) zeta_t(u)]` for each class of `u`.
///
/// By translation and lattice symmetry every trial contributes the average of
/// `zeta(x) zeta(x + u)` over all sites `x` and all `u` in the class orbit;
/// the standard error is taken across trials.
pub fn correlation_estimate(
    params: &ContactParams,
    t: f64,
    classes: &[CanonicalVertex],
    n_trials: u64,
    seed: u64,
) -> Result<Vec<MomentEstimate>> {
    let torus = torus_of(params)?;
    if n_trials == 0 {
        return Err(Error::usage("n_trials must be >= 1"));
    }
    let mut offsets = Vec::with_capacity(classes.len());
    for c in classes {
        if c.dim() != torus.dim() || 2 * c.sup_norm() >= torus.side() {
            return Err(Error::usage(format!("class {c:?} does not fit on the torus")));
        }
        offsets.push(orbit(c));
    }
    let per_trial = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut field = BcppField::all_ones(torus, params.lambda());
            run_until(&mut field, params, t, &mut substream(seed, i))?;
            let values: Vec<f64> = (0..torus.volume()).map(|x| field.value(x)).collect();
            Ok(offsets
                .iter()
                .map(|orbit| {
                    let mut sum = 0.0;
                    for x in 0..torus.volume() {
                        let vx = values[x];
                        if vx == 0.0 {
                            continue;
                        }
                        let base = torus.vertex_at(x);
                        for u in orbit {
                            let y = Vertex::new(base.coords().iter().zip(u.coords()).map(|(a, b)| a + b))
                                .expect("dimension >= 1");
                            sum += vx * values[torus.index_of(&y)];
                        }
                    }
                    sum / (torus.volume() * orbit.len()) as f64
                })
                .collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..classes.len())
        .map(|k| per_trial.iter().map(|row| row[k]).collect::<MeanVar>().into())
        .collect())
}
