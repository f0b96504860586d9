//! Second moments of the binary contact path process.
//!
//! `F_t(u) = E[zeta_t(O) zeta_t(u)]` from the all-ones start solves
//! `dF/dt = G F` with
//!
//! ```text
//! (G F)(O) = (1 - lambda) F(O) + 2 lambda F(e_1)
//! (G F)(x) = -2 lambda F(x) + (lambda / d) sum_{y ~ x} F(y)     x != O
//! ```
//!
//! Everything here lives on the symmetry-reduced sup-norm ball of radius `R`
//! with entries leaving the ball dropped. The dropped mass is nonnegative, so
//! the truncated `F` is below the lattice one.

use serde::{Deserialize, Serialize};

use crate::analytics::{b_lambda, second_moment_lower_bound, BoundParams};
use crate::lattice::{CanonicalBall, CanonicalVertex};
use crate::ode::{uniform_steps, Rk4};
use crate::walk::HarmonicSolution;
use crate::{Error, Result};

/// Magnitude treated as a blown-up integration.
pub const INSTABILITY_LIMIT: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct GOperator {
    lambda: f64,
    ball: CanonicalBall,
}

impl GOperator {
    pub fn new(lambda: f64, dim: usize, radius: u32) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::usage(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        Ok(GOperator { lambda, ball: CanonicalBall::new(dim, radius)? })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn dim(&self) -> usize {
        self.ball.dim()
    }

    pub fn radius(&self) -> u32 {
        self.ball.radius()
    }

    pub fn ball(&self) -> &CanonicalBall {
        &self.ball
    }

    /// `out = G f` on class-indexed vectors.
    fn apply_into(&self, f: &[f64], out: &mut [f64]) {
        let lambda = self.lambda;
        let off = lambda / self.dim() as f64;
        out[0] = (1.0 - lambda) * f[0] + 2.0 * lambda * f[self.ball.unit()];
        for (i, o) in out.iter_mut().enumerate().skip(1) {
            let s: f64 = self.ball.interior_neighbors(i).map(|(j, m)| m as f64 * f[j]).sum();
            *o = -2.0 * lambda * f[i] + off * s;
        }
    }

    fn check(&self, dim: usize, radius: u32) -> Result<()> {
        if dim != self.dim() || radius != self.radius() {
            return Err(Error::usage(format!(
                "field (d={dim}, R={radius}) does not match operator (d={}, R={})",
                self.dim(),
                self.radius()
            )));
        }
        Ok(())
    }
}

/// Values of a symmetric function on the ball, one per canonical class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationField {
    pub values: Vec<f64>,
    pub time: f64,
    pub radius: u32,
    pub dim: usize,
}

impl CorrelationField {
    pub fn constant(op: &GOperator, value: f64) -> Self {
        CorrelationField { values: vec![value; op.ball.len()], time: 0.0, radius: op.radius(), dim: op.dim() }
    }

    /// Value at `class`, or `None` outside the ball.
    pub fn get(&self, op: &GOperator, class: &CanonicalVertex) -> Option<f64> {
        op.ball.index_of(class).map(|i| self.values[i])
    }
}

/// Matrix-free product `G F`.
pub fn apply_g(field: &CorrelationField, op: &GOperator) -> Result<Vec<f64>> {
    op.check(field.dim, field.radius)?;
    let mut out = vec![0.0; field.values.len()];
    op.apply_into(&field.values, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    pub field: CorrelationField,
    pub steps: usize,
    pub dt: f64,
    /// Largest `|F|` seen at any step.
    pub max_abs: f64,
}

pub fn default_dt(lambda: f64) -> f64 {
    if lambda > 0.0 {
        0.1 / (2.0 * lambda)
    } else {
        0.1
    }
}

/// RK4 integration of `dF/dt = G F` from `F_0 = 1` up to `t_end`.
pub fn evolve_f(op: &GOperator, t_end: f64, dt: Option<f64>) -> Result<Evolution> {
    let dt = dt.unwrap_or_else(|| default_dt(op.lambda));
    if !(t_end >= 0.0 && t_end.is_finite()) || !(dt > 0.0) {
        return Err(Error::usage("need t_end >= 0 and dt > 0"));
    }
    let mut field = CorrelationField::constant(op, 1.0);
    let (steps, h) = uniform_steps(t_end, dt);
    let mut rk = Rk4::new(field.values.len());
    let mut max_abs = 1.0f64;
    for step in 0..steps {
        rk.step(|y, out| op.apply_into(y, out), &mut field.values, h);
        let m = field.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !(m <= INSTABILITY_LIMIT) {
            return Err(Error::Numerical(format!(
                "correlation field reached {m:e} at t = {}; retry with a smaller dt than {h}",
                (step + 1) as f64 * h
            )));
        }
        max_abs = max_abs.max(m);
    }
    field.time = t_end;
    Ok(Evolution { field, steps, dt: h, max_abs })
}

/// `L = h + b_lambda` over the ball, with `h` the absorbing hitting solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorL {
    pub values: Vec<f64>,
    pub b_lambda: f64,
    /// The `H` used in `b_lambda`.
    pub hitting: f64,
}

impl EigenvectorL {
    /// `H` taken as the same truncated `h(e_1)`, which makes the origin row of
    /// `G L` cancel exactly.
    pub fn matched(solution: &HarmonicSolution, lambda: f64) -> Self {
        Self::with_hitting(solution, lambda, solution.at_unit())
    }

    pub fn with_hitting(solution: &HarmonicSolution, lambda: f64, hitting: f64) -> Self {
        let b = b_lambda(lambda, hitting);
        EigenvectorL { values: solution.values.iter().map(|h| h + b).collect(), b_lambda: b, hitting }
    }

    pub fn is_positive(&self) -> bool {
        self.b_lambda > 0.0
    }

    /// `max (F - L / b)` over the ball; `None` when `b <= 0`.
    pub fn max_excess(&self, field: &CorrelationField) -> Option<f64> {
        self.is_positive().then(|| {
            field
                .values
                .iter()
                .zip(&self.values)
                .map(|(f, l)| f - l / self.b_lambda)
                .fold(f64::NEG_INFINITY, f64::max)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `sup |G L|` over classes `x != O` with `|x|_inf <= R / 2`.
    pub interior: f64,
    pub worst: CanonicalVertex,
    /// `|(G L)(O)|`.
    pub origin: f64,
}

/// Check that `L` is a null vector of `G` away from the truncation boundary.
pub fn verify_l(op: &GOperator, l: &EigenvectorL, tol: f64) -> Result<ResidualReport> {
    if l.values.len() != op.ball.len() {
        return Err(Error::usage("eigenvector does not match the operator's ball"));
    }
    let mut gl = vec![0.0; l.values.len()];
    op.apply_into(&l.values, &mut gl);
    let half = op.radius() / 2;
    let (worst, interior) = (1..gl.len())
        .filter(|&i| op.ball.class(i).sup_norm() <= half)
        .map(|i| (i, gl[i].abs()))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let report = ResidualReport { interior, worst: op.ball.class(worst).clone(), origin: gl[0].abs() };
    if report.interior > tol || report.origin > tol {
        return Err(Error::InvariantViolation(format!(
            "G L residual {:e} at {:?}, origin row {:e}, tolerance {tol:e}",
            report.interior, report.worst, report.origin
        )));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMomentRow {
    pub set_size: u64,
    /// `sum_{x, y in A} F_t(x - y)`.
    pub lhs: f64,
    /// `((|A|^2 - |A|)(H + b) + |A|(1 + b)) / b`.
    pub rhs: f64,
    /// `|A|^2 / lhs`, the Cauchy-Schwarz survival bound from the truncated `F`.
    pub survival_bound: f64,
    /// `|A|^2 / rhs`.
    pub closed_form: f64,
    pub lemma_bound: f64,
}

impl SecondMomentRow {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol && self.survival_bound >= self.lemma_bound - tol
    }
}

/// Compare `sum_{x,y in A} F_t(x - y)` against its eigenvector bound for
/// `A = {0, e_1, ..., (n-1) e_1}`, `n = 1..=max_set_size`.
///
/// `hitting` should be an upper estimate of `H(d)`: the right side increases
/// with `H`, so the comparison stays valid for the lattice.
pub fn second_moment_bound_check(
    lambda: f64,
    dim: usize,
    radius: u32,
    t: f64,
    max_set_size: u64,
    hitting: f64,
) -> Result<Vec<SecondMomentRow>> {
    let b = b_lambda(lambda, hitting);
    if !(b > 0.0) {
        return Err(Error::domain(format!(
            "b_lambda = {b} <= 0 for lambda = {lambda}, H = {hitting}; the eigenvector bound needs b > 0"
        )));
    }
    if max_set_size == 0 || max_set_size > radius as u64 {
        return Err(Error::usage("set size must lie in 1..=R"));
    }
    let op = GOperator::new(lambda, dim, radius)?;
    let field = evolve_f(&op, t, None)?.field;
    let axis_value = |k: u64| {
        let mut c = vec![0u32; dim];
        c[0] = k as u32;
        field.get(&op, &CanonicalVertex::from_sorted(c).expect("sorted")).expect("inside ball")
    };
    (1..=max_set_size)
        .map(|n| {
            let lhs = n as f64 * axis_value(0)
                + 2.0 * (1..n).map(|k| (n - k) as f64 * axis_value(k)).sum::<f64>();
            let nf = n as f64;
            let rhs = ((nf * nf - nf) * (hitting + b) + nf * (1.0 + b)) / b;
            let lemma = second_moment_lower_bound(&BoundParams {
                lambda,
                dim: Some(dim as u32),
                hitting,
                set_size: n,
                level: n,
            })?;
            Ok(SecondMomentRow {
                set_size: n,
                lhs,
                rhs,
                survival_bound: nf * nf / lhs,
                closed_form: nf * nf / rhs,
                lemma_bound: lemma.value,
            })
        })
        .collect()
}
