//! Event-driven simulation of the contact process.
//!
//! An infected site recovers at rate 1; a healthy site `x` becomes infected at
//! rate `lambda / 2d` times its number of infected neighbors. The simulator
//! realizes these rates by thinning: events fire at total rate
//! `|eta| (1 + lambda)`, pick a uniform infected site, and either recover it
//! (probability `1 / (1 + lambda)`) or push an infection to a uniform neighbor,
//! which is a no-op if that neighbor is already infected.

mod config;
mod duality;

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{Geometry, Vertex};
use crate::rng::{substream, StreamRng};
use crate::stats::binomial_std_err;
use crate::{Error, Result};

pub use config::SparseConfig;
pub use duality::{duality_check, DualityReport, MonotoneCoupling};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactParams {
    lambda: f64,
    geometry: Geometry,
}

impl ContactParams {
    /// `lambda = 0` is accepted (pure death process).
    pub fn new(lambda: f64, geometry: Geometry) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::usage(format!("infection rate must be finite and >= 0, got {lambda}")));
        }
        if geometry.dim() == 0 {
            return Err(Error::usage("dimension must be >= 1"));
        }
        Ok(ContactParams { lambda, geometry })
    }

    pub fn lattice(lambda: f64, dim: usize) -> Result<Self> {
        Self::new(lambda, Geometry::Lattice { dim })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Recovery { site: Vertex },
    /// `accepted` is false when the target was already infected.
    Infection { source: Vertex, target: Vertex, accepted: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub elapsed: f64,
    pub event: Event,
}

/// Apply one event to `state` and return the waiting time that preceded it.
pub fn step<R: Rng + ?Sized>(
    state: &mut SparseConfig,
    params: &ContactParams,
    rng: &mut R,
) -> Result<Step> {
    if state.is_empty() {
        return Err(Error::usage("cannot step an empty configuration (absorbed)"));
    }
    let rate = state.len() as f64 * (1.0 + params.lambda);
    let elapsed: f64 = rng.sample::<f64, _>(Exp1) / rate;
    let event = apply_event(state, params, rng);
    Ok(Step { elapsed, event })
}

/// Run until the configuration dies out or the next event would fall after
/// time `t`. Returns the number of events applied.
pub fn run_until<R: Rng + ?Sized>(
    state: &mut SparseConfig,
    params: &ContactParams,
    t: f64,
    rng: &mut R,
) -> Result<u64> {
    let mut clock = 0.0;
    let mut events = 0;
    while !state.is_empty() {
        // By memorylessness an event drawn past the horizon can be discarded.
        let rate = state.len() as f64 * (1.0 + params.lambda);
        let wait: f64 = rng.sample::<f64, _>(Exp1) / rate;
        if clock + wait > t {
            break;
        }
        clock += wait;
        apply_event(state, params, rng);
        events += 1;
    }
    Ok(events)
}

fn apply_event<R: Rng + ?Sized>(state: &mut SparseConfig, params: &ContactParams, rng: &mut R) -> Event {
    let site = state.sample(rng).expect("nonempty").clone();
    if rng.random::<f64>() * (1.0 + params.lambda) < 1.0 {
        state.remove(&site);
        Event::Recovery { site }
    } else {
        let k = rng.random_range(0..2 * params.dim());
        let target = params.geometry.neighbor(&site, k);
        let accepted = state.insert(target.clone());
        Event::Infection { source: site, target, accepted }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Extinct,
    ReachedThreshold,
    CensoredAtHorizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub verdict: Verdict,
    pub extinction_time: Option<f64>,
    /// Largest infected-set size seen (0 only for an empty start).
    pub max_size: usize,
    pub event_count: u64,
}

/// Simulate from `initial` until extinction, until `|eta| >= threshold`, or
/// until the clock passes `horizon`.
pub fn run_trial<R: Rng + ?Sized>(
    initial: SparseConfig,
    params: &ContactParams,
    horizon: f64,
    threshold: usize,
    rng: &mut R,
) -> Result<TrialOutcome> {
    if !(horizon > 0.0) {
        return Err(Error::usage("horizon must be positive"));
    }
    if threshold == 0 {
        return Err(Error::usage("survival threshold must be >= 1"));
    }
    for v in initial.iter() {
        params.geometry.check_vertex(v)?;
    }
    let mut state = initial;
    let mut clock = 0.0;
    let mut max_size = state.len();
    let mut event_count = 0;
    let verdict = loop {
        if state.is_empty() {
            break Verdict::Extinct;
        }
        if state.len() >= threshold {
            break Verdict::ReachedThreshold;
        }
        let s = step(&mut state, params, rng)?;
        clock += s.elapsed;
        if clock > horizon {
            // The event happened after the horizon; report the pre-event state.
            break Verdict::CensoredAtHorizon;
        }
        event_count += 1;
        max_size = max_size.max(state.len());
    };
    Ok(TrialOutcome {
        verdict,
        extinction_time: (verdict == Verdict::Extinct).then_some(clock),
        max_size,
        event_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurvivalEstimate {
    /// Fraction of trials that reached the survival threshold.
    pub p_hat: f64,
    pub std_err: f64,
    pub n_trials: u64,
    pub n_reached: u64,
    /// Trials still alive but below threshold at the horizon; not in `p_hat`.
    pub n_censored: u64,
    /// `(1 / lambda)^threshold` for `lambda > 1`, else 1: the chance that a
    /// trial counted as surviving would still die out.
    pub threshold_error_bound: f64,
}

/// All trial outcomes from `{O}`, trial `i` on substream `i` of `seed`.
pub fn survival_trials(
    params: &ContactParams,
    n_trials: u64,
    horizon: f64,
    threshold: usize,
    seed: u64,
) -> Result<Vec<TrialOutcome>> {
    let origin = Vertex::origin(params.dim());
    (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut rng: StreamRng = substream(seed, i);
            run_trial(SparseConfig::single(origin.clone()), params, horizon, threshold, &mut rng)
        })
        .collect()
}

/// Monte Carlo estimate of the probability that the process from `{O}`
/// survives, with survival declared at `threshold` infected sites.
pub fn estimate_survival(
    params: &ContactParams,
    n_trials: u64,
    horizon: f64,
    threshold: usize,
    seed: u64,
) -> Result<SurvivalEstimate> {
    if n_trials == 0 {
        return Err(Error::usage("n_trials must be >= 1"));
    }
    let outcomes = survival_trials(params, n_trials, horizon, threshold, seed)?;
    let count = |v| outcomes.iter().filter(|o| o.verdict == v).count() as u64;
    let n_reached = count(Verdict::ReachedThreshold);
    let n_censored = count(Verdict::CensoredAtHorizon);
    let p_hat = n_reached as f64 / n_trials as f64;
    let lambda = params.lambda;
    Ok(SurvivalEstimate {
        p_hat,
        std_err: binomial_std_err(p_hat, n_trials),
        n_trials,
        n_reached,
        n_censored,
        threshold_error_bound: if lambda > 1.0 {
            lambda.recip().powf(threshold as f64)
        } else {
            1.0
        },
    })
}
