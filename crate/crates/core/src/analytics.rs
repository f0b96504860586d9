//! Closed forms: the mean-field ODE, gambler's-ruin probabilities of the two
//! dominating walks, and the lower bounds built from them.
//!
//! The hitting probability `H` is always an input here. Callers pass a value
//! estimated by [`crate::walk`] or a hypothetical one (`H = 0` for the
//! `d -> infinity` limit).

use serde::{Deserialize, Serialize};

use crate::ode::{uniform_steps, Rk4};
use crate::{Error, Result};

/// Ruin ratios this close to 1 use the continuous extension `1 / K`.
pub const DEGENERATE_RATIO_TOL: f64 = 1e-12;

/// Inputs shared by the closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub lambda: f64,
    /// Lattice dimension; `None` means the `d -> infinity` limit.
    pub dim: Option<u32>,
    /// Hitting probability `H(d)` of the origin from `e_1`.
    pub hitting: f64,
    /// Cardinality `|A|` of the initial set.
    pub set_size: u64,
    /// Threshold level `K`.
    pub level: u64,
}

/// A lower bound that may be vacuous (reported as 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub value: f64,
    pub vacuous: bool,
}

impl LowerBound {
    const VACUOUS: LowerBound = LowerBound { value: 0.0, vacuous: true };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub fixed_point: f64,
}

impl OdeSolution {
    pub fn final_value(&self) -> f64 {
        *self.values.last().expect("solution has at least f_0")
    }
}

/// Integrates `f' = -f + lambda f (1 - f)`, `f_0 = 1`, with RK4 on a uniform
/// grid of spacing at most `dt`.
pub fn solve_mean_field_ode(lambda: f64, t_end: f64, dt: f64) -> Result<OdeSolution> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::usage(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if !(t_end > 0.0 && dt > 0.0) {
        return Err(Error::usage("t_end and dt must be positive"));
    }
    if dt > t_end {
        return Err(Error::usage(format!("dt = {dt} exceeds t_end = {t_end}")));
    }
    let (n, h) = uniform_steps(t_end, dt);
    let mut times = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    let mut f = [1.0];
    let mut rk = Rk4::new(1);
    times.push(0.0);
    values.push(1.0);
    for i in 1..=n {
        rk.step(|y, dy| dy[0] = -y[0] + lambda * y[0] * (1.0 - y[0]), &mut f, h);
        times.push(i as f64 * h);
        values.push(f[0]);
    }
    Ok(OdeSolution { times, values, fixed_point: mean_field_survival(lambda) })
}

/// `(lambda - 1) / lambda` for `lambda > 1`, else 0.
///
/// This is the fixed point of the mean-field ODE and the probability that the
/// walk with up-probability `lambda / (1 + lambda)` started at 1 never hits 0,
/// which dominates the infected-set size from above.
pub fn mean_field_survival(lambda: f64) -> f64 {
    if lambda > 1.0 {
        (lambda - 1.0) / lambda
    } else {
        0.0
    }
}

/// `(lambda - 1) / (2 lambda)`: the older high-dimension lower bound, half the
/// mean-field value.
pub fn half_mean_field_bound(lambda: f64) -> f64 {
    0.5 * mean_field_survival(lambda)
}

/// `b_lambda = (lambda - 1 - 2 lambda H) / (lambda + 1)`.
pub fn b_lambda(lambda: f64, hitting: f64) -> f64 {
    (lambda - 1.0 - 2.0 * lambda * hitting) / (lambda + 1.0)
}

/// Up-rate `lambda (1 - K / 2d)` of the walk dominating the embedded chain
/// from below while fewer than `K` sites are infected.
pub fn lower_walk_rate(lambda: f64, dim: Option<u32>, level: u64) -> f64 {
    match dim {
        Some(d) => lambda * (1.0 - level as f64 / (2.0 * d as f64)),
        None => lambda,
    }
}

/// Probability that the walk with up-probability `rho / (1 + rho)`,
/// `rho = lambda (1 - K / 2d)`, reaches `K` before 0 when started at 1.
///
/// With `r = 1 / rho` this is `(1 - r) / (1 - r^K)`, extended by `1 / K` at
/// `r = 1`. It is a valid ruin probability for either sign of `rho - 1`; only
/// `rho > 1` is the supercritical regime the survival argument uses.
pub fn reach_probability(lambda: f64, dim: Option<u32>, level: u64) -> Result<f64> {
    if level == 0 {
        return Err(Error::usage("level K must be >= 1"));
    }
    if dim == Some(0) {
        return Err(Error::usage("dimension must be >= 1"));
    }
    let rho = lower_walk_rate(lambda, dim, level);
    if !(rho > 0.0) {
        return Err(Error::domain(format!(
            "up-rate lambda (1 - K/2d) = {rho} is not positive (lambda={lambda}, d={dim:?}, K={level})"
        )));
    }
    Ok(gamblers_ruin(1.0 / rho, level).clamp(0.0, 1.0))
}

/// `P(reach K before 0 | start 1)` for a walk with down/up odds ratio `r`.
fn gamblers_ruin(r: f64, level: u64) -> f64 {
    if (r - 1.0).abs() < DEGENERATE_RATIO_TOL {
        return 1.0 / level as f64;
    }
    let k = level as f64;
    if r < 1.0 {
        (1.0 - r) / (1.0 - r.powf(k))
    } else {
        let rk = r.powf(k);
        if rk.is_infinite() {
            0.0
        } else {
            (r - 1.0) / (rk - 1.0)
        }
    }
}

/// Survival lower bound from a finite set of `|A|` infected sites:
///
/// `|A|^2 (lambda - 1 - 2 lambda H) /
///  ((|A|^2 - |A|)(lambda - 1)(1 - H) + 2 |A| lambda (1 - H))`.
///
/// A nonpositive numerator makes the bound vacuous; it is then reported as 0.
pub fn second_moment_lower_bound(params: &BoundParams) -> Result<LowerBound> {
    let BoundParams { lambda, hitting, set_size, .. } = *params;
    if !(0.0..1.0).contains(&hitting) {
        return Err(Error::domain(format!("hitting probability must lie in [0, 1), got {hitting}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("lambda must be positive, got {lambda}")));
    }
    if set_size == 0 {
        return Err(Error::usage("set size |A| must be >= 1"));
    }
    let a = set_size as f64;
    let numerator = a * a * (lambda - 1.0 - 2.0 * lambda * hitting);
    if numerator <= 0.0 {
        return Ok(LowerBound::VACUOUS);
    }
    let denominator =
        (a * a - a) * (lambda - 1.0) * (1.0 - hitting) + 2.0 * a * lambda * (1.0 - hitting);
    Ok(LowerBound { value: (numerator / denominator).min(1.0), vacuous: false })
}

/// Lower bound on survival from `{O}`: reach `K` sites (lower walk), then
/// survive from a set of size `K`.
///
/// Where the lower walk has no upward moves (`lambda (1 - K/2d) <= 0`) the
/// reach bound is the trivial 0 and the result is vacuous.
pub fn combined_lower_bound(
    lambda: f64,
    dim: Option<u32>,
    hitting: f64,
    level: u64,
) -> Result<LowerBound> {
    if level == 0 {
        return Err(Error::usage("level K must be >= 1"));
    }
    let lemma = second_moment_lower_bound(&BoundParams {
        lambda,
        dim,
        hitting,
        set_size: level,
        level,
    })?;
    if lemma.vacuous || lower_walk_rate(lambda, dim, level) <= 0.0 {
        return Ok(LowerBound::VACUOUS);
    }
    let reach = reach_probability(lambda, dim, level)?;
    Ok(LowerBound { value: reach * lemma.value, vacuous: false })
}

/// The largest combined lower bound over `K in 1..=max_level`.
pub fn best_combined_lower_bound(
    lambda: f64,
    dim: Option<u32>,
    hitting: f64,
    max_level: u64,
) -> Result<(u64, LowerBound)> {
    let mut best = (1, combined_lower_bound(lambda, dim, hitting, 1)?);
    for k in 2..=max_level {
        let b = combined_lower_bound(lambda, dim, hitting, k)?;
        if b.value > best.1.value {
            best = (k, b);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: LowerBound,
    /// `(lambda - 1) / lambda`.
    pub upper: f64,
    /// `(lambda - 1) / (2 lambda)`.
    pub half_bound: f64,
}

/// All three survival bounds at once. Fails with an invariant violation if the
/// lower bound exceeds the upper one.
pub fn bound_sandwich(lambda: f64, dim: Option<u32>, hitting: f64, level: u64) -> Result<Sandwich> {
    let lower = combined_lower_bound(lambda, dim, hitting, level)?;
    let upper = mean_field_survival(lambda);
    if lower.value > upper {
        return Err(Error::InvariantViolation(format!(
            "lower bound {} exceeds upper bound {upper}",
            lower.value
        )));
    }
    Ok(Sandwich { lower, upper, half_bound: half_mean_field_bound(lambda) })
}
