//! Self-duality on a torus and the monotone coupling in `lambda`.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_until, ContactParams, SparseConfig};
use crate::lattice::{Geometry, Vertex};
use crate::rng::{derive_seed, substream};
use crate::stats::two_proportion_z;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub time: f64,
    pub n_trials: u64,
    /// Estimate of `P(eta_t^{O} != empty)`.
    pub p_single_survives: f64,
    /// Estimate of `P(eta_t^{full}(O) = 1)`.
    pub p_full_covers_origin: f64,
    pub z_score: f64,
}

/// Compare survival to time `t` from `{O}` with occupation of `O` at time `t`
/// from the fully infected torus. Self-duality makes the two equal in law.
pub fn duality_check(params: &ContactParams, t: f64, n_trials: u64, seed: u64) -> Result<DualityReport> {
    let Geometry::Torus(torus) = *params.geometry() else {
        return Err(Error::usage("duality check needs a torus (full occupancy must be finite)"));
    };
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::usage(format!("time must be finite and >= 0, got {t}")));
    }
    if n_trials == 0 {
        return Err(Error::usage("n_trials must be >= 1"));
    }
    let origin = Vertex::origin(torus.dim());
    let full: SparseConfig = (0..torus.volume()).map(|i| torus.vertex_at(i)).collect();

    let single_seed = derive_seed(seed, 0);
    let full_seed = derive_seed(seed, 1);
    let survived = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut state = SparseConfig::single(origin.clone());
            run_until(&mut state, params, t, &mut substream(single_seed, i))?;
            Ok(!state.is_empty() as u64)
        })
        .sum::<Result<u64>>()?;
    let covered = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut state = full.clone();
            run_until(&mut state, params, t, &mut substream(full_seed, i))?;
            Ok(state.contains(&origin) as u64)
        })
        .sum::<Result<u64>>()?;

    let n = n_trials as f64;
    Ok(DualityReport {
        time: t,
        n_trials,
        p_single_survives: survived as f64 / n,
        p_full_covers_origin: covered as f64 / n,
        z_score: two_proportion_z(survived, n_trials, covered, n_trials),
    })
}

/// Two contact processes at `lambda_low <= lambda_high` driven by one event
/// stream. Infections of the lower process are thinned with probability
/// `lambda_low / lambda_high`, so `low` stays inside `high` at every event.
#[derive(Debug, Clone)]
pub struct MonotoneCoupling {
    pub low: SparseConfig,
    pub high: SparseConfig,
    lambda_low: f64,
    lambda_high: f64,
    geometry: Geometry,
    clock: f64,
}

impl MonotoneCoupling {
    pub fn new(initial: SparseConfig, lambda_low: f64, lambda_high: f64, geometry: Geometry) -> Result<Self> {
        if !(0.0 < lambda_low && lambda_low <= lambda_high) {
            return Err(Error::usage("need 0 < lambda_low <= lambda_high"));
        }
        Ok(MonotoneCoupling {
            low: initial.clone(),
            high: initial,
            lambda_low,
            lambda_high,
            geometry,
            clock: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.clock
    }

    pub fn is_ordered(&self) -> bool {
        self.low.iter().all(|v| self.high.contains(v))
    }

    /// One event of the joint chain; `false` once the upper process is empty.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.high.is_empty() {
            return false;
        }
        let rate = self.high.len() as f64 * (1.0 + self.lambda_high);
        self.clock += rng.sample::<f64, _>(Exp1) / rate;
        let site = self.high.sample(rng).expect("nonempty").clone();
        if rng.random::<f64>() * (1.0 + self.lambda_high) < 1.0 {
            self.high.remove(&site);
            self.low.remove(&site);
        } else {
            let k = rng.random_range(0..2 * self.geometry.dim());
            let target = self.geometry.neighbor(&site, k);
            let thinned = rng.random::<f64>() * self.lambda_high < self.lambda_low;
            if thinned && self.low.contains(&site) {
                self.low.insert(target.clone());
            }
            self.high.insert(target);
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Torus;

    #[test]
    fn time_zero_is_exact() {
        let p = ContactParams::new(1.5, Geometry::Torus(Torus::new(2, 4).unwrap())).unwrap();
        let r = duality_check(&p, 0.0, 100, 0).unwrap();
        assert_eq!((r.p_single_survives, r.p_full_covers_origin, r.z_score), (1.0, 1.0, 0.0));
    }

    #[test]
    fn rejects_lattice_and_negative_time() {
        let p = ContactParams::lattice(1.5, 2).unwrap();
        assert!(matches!(duality_check(&p, 1.0, 10, 0), Err(Error::Usage(_))));
        let p = ContactParams::new(1.5, Geometry::Torus(Torus::new(2, 4).unwrap())).unwrap();
        assert!(matches!(duality_check(&p, -1.0, 10, 0), Err(Error::Usage(_))));
    }

    #[test]
    fn pure_death_matches_exponential_law() {
        let p = ContactParams::new(0.0, Geometry::Torus(Torus::new(2, 4).unwrap())).unwrap();
        let r = duality_check(&p, 1.0, 10_000, 3).unwrap();
        let target = (-1.0f64).exp();
        let sd = (target * (1.0 - target) / 10_000.0).sqrt();
        assert!((r.p_single_survives - target).abs() < 3.0 * sd);
        assert!((r.p_full_covers_origin - target).abs() < 3.0 * sd);
        assert!(r.z_score.abs() < 3.0);
    }

    #[test]
    fn monotone_coupling_preserves_containment() {
        let geometry = Geometry::Lattice { dim: 2 };
        for trial in 0..100 {
            let start = SparseConfig::single(Vertex::origin(2));
            let mut c = MonotoneCoupling::new(start, 1.0, 2.0, geometry).unwrap();
            let mut rng = substream(17, trial);
            let mut events = 0;
            while c.time() < 5.0 && events < 20_000 && c.step(&mut rng) {
                assert!(c.is_ordered(), "trial {trial} event {events}");
                events += 1;
            }
        }
    }
}
