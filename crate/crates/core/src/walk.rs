//! Probability `H(d)` that simple random walk on `Z^d` started at `e_1` ever
//! visits the origin.
//!
//! Two estimators: direct path simulation (a lower estimate, since walks are
//! cut off after `max_steps`) and a harmonic solve on a symmetry-reduced ball
//! with an upper certificate built from a superharmonic majorant.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{nonincreasing_sequences, CanonicalBall, CanonicalVertex};
use crate::rng::{derive_seed, substream};
use crate::stats::binomial_std_err;
use crate::{Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const MAX_SWEEPS: u64 = 100_000;

/// Walks sharing one random substream.
const BLOCK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MonteCarlo,
    HarmonicSolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truncation {
    Steps(u64),
    Radius(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingEstimate {
    pub h: f64,
    pub method: Method,
    pub truncation: Truncation,
    pub std_err: Option<f64>,
    pub bracket: Option<(f64, f64)>,
}

/// Direction lookup for one random byte; bytes at or above `limit` are
/// rejected so that every direction has equal weight. Direction `2a` is `+e_a`
/// and `2a + 1` is `-e_a`.
struct DirectionTable {
    dir: [u8; 256],
    /// `dir`, with rejected bytes mapped to the discard slot `2d`.
    slot: [u8; 256],
    limit: u16,
}

impl DirectionTable {
    fn new(dim: usize) -> Option<Self> {
        let n = 2 * dim;
        if n > 256 {
            return None;
        }
        let limit = (256 - 256 % n) as u16;
        let mut dir = [0u8; 256];
        let mut slot = [n as u8; 256];
        for b in 0..limit as usize {
            dir[b] = (b % n) as u8;
            slot[b] = dir[b];
        }
        Some(DirectionTable { dir, slot, limit })
    }
}

/// Buffered random bytes.
struct ByteSource {
    buf: [u8; 256],
    next: usize,
}

impl ByteSource {
    fn new() -> Self {
        ByteSource { buf: [0; 256], next: 256 }
    }

    #[inline]
    fn byte<R: RngCore>(&mut self, rng: &mut R) -> u8 {
        if self.next == self.buf.len() {
            rng.fill_bytes(&mut self.buf);
            self.next = 0;
        }
        let b = self.buf[self.next];
        self.next += 1;
        b
    }
}

/// Direction histogram kept in four interleaved copies so consecutive bytes
/// do not wait on each other's counter. Rejected bytes land in a discard slot.
struct Tally {
    slots: usize,
    counts: Vec<u32>,
}

impl Tally {
    fn new(dim: usize) -> Self {
        let slots = 2 * dim + 1;
        Tally { slots, counts: vec![0; 4 * slots] }
    }

    /// Tally exactly `n` accepted directions.
    fn draw<R: RngCore>(&mut self, mut n: u64, table: &DirectionTable, src: &mut ByteSource, rng: &mut R) {
        let s = self.slots;
        let c = &mut self.counts;
        while n >= 8 {
            if src.next + 8 > src.buf.len() {
                rng.fill_bytes(&mut src.buf);
                src.next = 0;
            }
            let chunk = &src.buf[src.next..src.next + 8];
            src.next += 8;
            let mut accepted = 0;
            for (j, &b) in chunk.iter().enumerate() {
                c[(j & 3) * s + table.slot[b as usize] as usize] += 1;
                accepted += ((b as u16) < table.limit) as u64;
            }
            n -= accepted;
        }
        while n > 0 {
            let b = src.byte(rng);
            if (b as u16) < table.limit {
                c[table.slot[b as usize] as usize] += 1;
                n -= 1;
            }
        }
        for copy in 0..4 {
            c[copy * s + s - 1] = 0;
        }
    }

    /// Net displacement along `axis`; resets that axis.
    fn net(&mut self, axis: usize) -> i32 {
        let s = self.slots;
        let mut net = 0i32;
        for copy in 0..4 {
            let base = copy * s + 2 * axis;
            net += self.counts[base] as i32 - self.counts[base + 1] as i32;
            self.counts[base] = 0;
            self.counts[base + 1] = 0;
        }
        net
    }
}

/// Below this L1 norm the walk is advanced one step at a time.
const BULK_THRESHOLD: u64 = 16;

/// One walk from `e_1`; returns whether it reached the origin within
/// `max_steps`. The walk stops early once its L1 norm exceeds the steps left.
///
/// From L1 norm `n` the origin is at least `n` steps away, so the next `n - 1`
/// steps are drawn as a direction histogram and applied at once.
fn walk_hits<R: RngCore>(
    pos: &mut [i32],
    tally: &mut Tally,
    table: &DirectionTable,
    max_steps: u64,
    src: &mut ByteSource,
    rng: &mut R,
) -> bool {
    pos.fill(0);
    pos[0] = 1;
    let mut l1: u64 = 1;
    let mut left = max_steps;
    while left > 0 {
        if l1 >= BULK_THRESHOLD {
            let batch = (l1 - 1).min(left);
            tally.draw(batch, table, src, rng);
            for (axis, p) in pos.iter_mut().enumerate() {
                *p += tally.net(axis);
            }
            l1 = pos.iter().map(|p| p.unsigned_abs() as u64).sum();
            left -= batch;
        } else {
            let b = src.byte(rng);
            if b as u16 >= table.limit {
                continue;
            }
            let k = table.dir[b as usize] as usize;
            let old = pos[k / 2];
            let new = if k % 2 == 0 { old + 1 } else { old - 1 };
            pos[k / 2] = new;
            l1 = l1 + new.unsigned_abs() as u64 - old.unsigned_abs() as u64;
            left -= 1;
            if l1 == 0 {
                return true;
            }
        }
        if l1 > left {
            return false;
        }
    }
    false
}

/// Same walk for `2d > 256`, drawing each direction separately.
fn walk_hits_wide<R: Rng>(pos: &mut [i32], max_steps: u64, rng: &mut R) -> bool {
    pos.fill(0);
    pos[0] = 1;
    let mut l1: u64 = 1;
    for left in (0..max_steps).rev() {
        let k = rng.random_range(0..2 * pos.len());
        let old = pos[k / 2];
        let new = if k % 2 == 0 { old + 1 } else { old - 1 };
        pos[k / 2] = new;
        l1 = l1 + new.unsigned_abs() as u64 - old.unsigned_abs() as u64;
        if l1 == 0 {
            return true;
        }
        if l1 > left {
            return false;
        }
    }
    false
}

/// Fraction of `n_walks` walks from `e_1` that visit the origin within
/// `max_steps` steps.
pub fn h_monte_carlo(dim: usize, n_walks: u64, max_steps: u64, seed: u64) -> Result<HittingEstimate> {
    if dim == 0 {
        return Err(Error::usage("dimension must be >= 1"));
    }
    if max_steps == 0 || n_walks == 0 {
        return Err(Error::usage("max_steps and n_walks must be >= 1"));
    }
    let table = DirectionTable::new(dim);
    let blocks = n_walks.div_ceil(BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, b);
            let mut pos = vec![0i32; dim];
            let mut tally = Tally::new(dim);
            let mut src = ByteSource::new();
            let count = BLOCK.min(n_walks - b * BLOCK);
            (0..count)
                .filter(|_| match &table {
                    Some(t) => walk_hits(&mut pos, &mut tally, t, max_steps, &mut src, &mut rng),
                    None => walk_hits_wide(&mut pos, max_steps, &mut rng),
                })
                .count() as u64
        })
        .sum();
    let h = hits as f64 / n_walks as f64;
    Ok(HittingEstimate {
        h,
        method: Method::MonteCarlo,
        truncation: Truncation::Steps(max_steps),
        std_err: Some(binomial_std_err(h, n_walks)),
        bracket: None,
    })
}

/// Successive over-relaxation for `u(x) = mean of u over the 2d neighbors` on
/// the ball minus the origin, with `u(O) = origin_value` and `exterior` data on
/// the sup-norm sphere of radius `R`.
///
/// Iterates until one full sweep changes no value by more than `tol` and the
/// true residual is below `tol`.
fn relax(
    ball: &CanonicalBall,
    origin_value: f64,
    exterior: impl Fn(&CanonicalVertex) -> f64,
    tol: f64,
) -> Result<(Vec<f64>, u64)> {
    let n = ball.len();
    let two_d = 2.0 * ball.dim() as f64;
    let boundary: Vec<f64> = (0..n)
        .map(|i| ball.exterior_neighbors(i).map(|(c, m)| m as f64 * exterior(c)).sum())
        .collect();
    let omega = 2.0 / (1.0 + (std::f64::consts::PI / (2.0 * ball.radius() as f64)).sin());
    let mut u = vec![0.0; n];
    u[ball.origin()] = origin_value;
    let mut last_residual = f64::INFINITY;
    for sweep in 1..=MAX_SWEEPS {
        let mut change = 0.0f64;
        for i in 1..n {
            let s: f64 = ball.interior_neighbors(i).map(|(j, m)| m as f64 * u[j]).sum();
            let target = (s + boundary[i]) / two_d;
            let delta = target - u[i];
            change = change.max(delta.abs());
            u[i] += omega * delta;
        }
        if change < tol {
            last_residual = residual(ball, &u, &boundary);
            if last_residual < tol {
                return Ok((u, sweep));
            }
        }
    }
    Err(Error::Numerical(format!(
        "harmonic solve d={}, R={} did not converge in {MAX_SWEEPS} sweeps (last residual {last_residual:e})",
        ball.dim(),
        ball.radius()
    )))
}

fn residual(ball: &CanonicalBall, u: &[f64], boundary: &[f64]) -> f64 {
    let two_d = 2.0 * ball.dim() as f64;
    (1..ball.len())
        .map(|i| {
            let s: f64 = ball.interior_neighbors(i).map(|(j, m)| m as f64 * u[j]).sum();
            ((s + boundary[i]) / two_d - u[i]).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct HarmonicSolution {
    pub ball: CanonicalBall,
    /// `h` per canonical class, indexed like `ball.classes()`.
    pub values: Vec<f64>,
    pub sweeps: u64,
    pub max_residual: f64,
    pub estimate: HittingEstimate,
}

impl HarmonicSolution {
    /// `h` at a class; zero outside the ball.
    pub fn value(&self, class: &CanonicalVertex) -> f64 {
        self.ball.index_of(class).map_or(0.0, |i| self.values[i])
    }

    pub fn at_unit(&self) -> f64 {
        self.values[self.ball.unit()]
    }
}

/// Hitting probabilities with absorbing truncation at sup-norm radius `R`.
///
/// `estimate.h` is the truncated value at `e_1`, a lower bound for `H(d)`.
/// The bracket's upper end is certified by [`upper_certificate`].
pub fn h_harmonic_solve(dim: usize, radius: u32, tol: f64) -> Result<HarmonicSolution> {
    if !(tol > 0.0) {
        return Err(Error::usage("tolerance must be > 0"));
    }
    let ball = CanonicalBall::new(dim, radius)?;
    let (values, sweeps) = relax(&ball, 1.0, |_| 0.0, tol)?;
    let boundary = vec![0.0; ball.len()];
    let max_residual = residual(&ball, &values, &boundary);
    let lower = values[ball.unit()];
    let upper = upper_certificate(&ball, &values, tol)?.max(lower);
    Ok(HarmonicSolution {
        estimate: HittingEstimate {
            h: lower,
            method: Method::HarmonicSolve,
            truncation: Truncation::Radius(radius),
            std_err: None,
            bracket: Some((lower, upper)),
        },
        ball,
        values,
        sweeps,
        max_residual,
    })
}

/// Sufficient condition for `phi(x) = |x|^(-2 beta)` to be superharmonic at
/// every `x` with `|x|^2 >= s`.
///
/// Expanding `(1 + a/s)^(-beta)` to third order with a Lagrange remainder and
/// summing over the `2d` neighbors, superharmonicity follows from
/// `2d - 4(beta+1) >= (beta+1) d / s
///     + (beta+1)(beta+2)(beta+3)/24 * (2d + 48 s + 32 s^2) / s^3 * (1 - m)^(-beta-4)`
/// with `m = (1 + 2 sqrt(s)) / s`; the cubic term is negative and dropped.
/// The right side decreases in `s`.
pub fn power_superharmonic_from(dim: usize, beta: f64, s: f64) -> bool {
    let d = dim as f64;
    let m = (1.0 + 2.0 * s.sqrt()) / s;
    if m >= 1.0 || beta <= 0.0 {
        return false;
    }
    let lhs = 2.0 * d - 4.0 * (beta + 1.0);
    let c4 = (beta + 1.0) * (beta + 2.0) * (beta + 3.0) / 24.0;
    let rhs = (beta + 1.0) * d / s
        + c4 * (2.0 * d + 48.0 * s + 32.0 * s * s) / (s * s * s) * (1.0 - m).powf(-beta - 4.0);
    lhs >= rhs
}

/// Upper bound on `H(d)` from a superharmonic majorant, given the absorbing
/// solution `h_abs` on `ball`.
///
/// For `beta` in a grid, `psi` solves the harmonic problem with `psi(O) = 0`
/// and exterior data `phi = |x|^(-2 beta)`. The function
/// `W = h_abs + C psi` inside the ball and `W = C phi` outside is nonnegative,
/// equals 1 at `O`, and is harmonic inside the ball. It is superharmonic on the
/// sphere `|x|_inf = R` once `C` dominates the ratio of inner `h_abs` inflow
/// to the local gap of `phi`, and beyond it by [`power_superharmonic_from`].
/// Any such `W` dominates the hitting probability, so `W(e_1)` is an upper
/// bound. Recurrent dimensions get the trivial bound 1.
pub fn upper_certificate(ball: &CanonicalBall, h_abs: &[f64], tol: f64) -> Result<f64> {
    let dim = ball.dim();
    if dim <= 2 {
        return Ok(1.0);
    }
    let r = ball.radius();
    let s_far = ((r + 1) as f64).powi(2);
    let ring = nonincreasing_sequences(dim, r..=r);
    let two_d = 2.0 * dim as f64;
    let unit = ball.unit();
    let mut best = 1.0f64;
    for k in 1..=24 {
        let beta = k as f64 / 25.0;
        if !power_superharmonic_from(dim, beta, s_far) {
            continue;
        }
        let phi = |c: &CanonicalVertex| (c.squared_norm() as f64).powf(-beta);
        let (psi, _) = relax(ball, 0.0, phi, tol)?;
        let mut c_needed = 0.0f64;
        let mut valid = true;
        for y in &ring {
            let mut out = 0.0;
            let mut inflow = 0.0;
            for n in y.lattice_neighbors() {
                match ball.index_of(&n) {
                    Some(j) => {
                        out += psi[j];
                        inflow += h_abs[j];
                    }
                    None => out += phi(&n),
                }
            }
            let gap = phi(y) - out / two_d;
            // Keep a margin over the solver tolerance in the gap.
            if gap <= 4.0 * tol {
                valid = false;
                break;
            }
            c_needed = c_needed.max((inflow / two_d + tol) / (gap - 2.0 * tol));
        }
        if valid {
            best = best.min(h_abs[unit] + c_needed * (psi[unit] + tol));
        }
    }
    Ok(best.min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KestenRow {
    pub dim: usize,
    pub h: f64,
    pub std_err: f64,
    pub two_d_h: f64,
    /// `2d h` inside `(0.85, 1.15)`; only judged for `d >= 8`.
    pub in_band: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KestenReport {
    pub rows: Vec<KestenRow>,
    /// `h` decreasing along the sorted list within three joint standard errors.
    pub monotone: bool,
}

pub const KESTEN_BAND: (f64, f64) = (0.85, 1.15);

/// Monte Carlo `h` and `2d h` for each dimension. Dimension `d` uses the
/// substream seed `derive_seed(seed, d)`.
pub fn kesten_check(dims: &[usize], n_walks: u64, max_steps: u64, seed: u64) -> Result<KestenReport> {
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    if let Some(&d) = dims.iter().find(|&&d| d < 3) {
        return Err(Error::usage(format!("Kesten check needs d >= 3, got {d}")));
    }
    let rows = dims
        .iter()
        .map(|&d| {
            let est = h_monte_carlo(d, n_walks, max_steps, derive_seed(seed, d as u64))?;
            let two_d_h = 2.0 * d as f64 * est.h;
            Ok(KestenRow {
                dim: d,
                h: est.h,
                std_err: est.std_err.unwrap_or(0.0),
                two_d_h,
                in_band: (d >= 8).then_some(KESTEN_BAND.0 < two_d_h && two_d_h < KESTEN_BAND.1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| {
        let joint = (w[0].std_err.powi(2) + w[1].std_err.powi(2)).sqrt();
        w[1].h - w[0].h < 3.0 * joint
    });
    Ok(KestenReport { rows, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::b_lambda;
    use proptest::prelude::*;

    /// Reference values of `H(d)` from `1 - 1/G(0)` with
    /// `G(0) = int_0^inf e^{-t} I_0(t/d)^d dt`, evaluated by quadrature.
    const H3: f64 = 0.340537329550999;
    const H4: f64 = 0.193201673224984;
    const H5: f64 = 0.135178609820655;
    const H6: f64 = 0.104715495628822;

    #[test]
    fn direction_table_is_uniform() {
        for d in [1, 3, 5, 7, 100, 128] {
            let t = DirectionTable::new(d).unwrap();
            let mut counts = vec![0u32; 2 * d];
            for b in 0..t.limit as usize {
                counts[t.dir[b] as usize] += 1;
            }
            assert!(counts.iter().all(|&c| c == counts[0]), "d={d}");
        }
        assert!(DirectionTable::new(129).is_none());
    }

    #[test]
    fn one_dimension_is_recurrent() {
        let e = h_monte_carlo(1, 10_000, 100_000, 3).unwrap();
        assert!(e.h > 0.99, "{e:?}");
        assert_eq!(e.truncation, Truncation::Steps(100_000));
    }

    #[test]
    fn single_step_hits_with_probability_one_over_2d() {
        for d in [1, 3, 6] {
            let e = h_monte_carlo(d, 200_000, 1, 11).unwrap();
            let p = 1.0 / (2 * d) as f64;
            assert!((e.h - p).abs() < 4.0 * binomial_std_err(p, 200_000), "d={d}: {e:?}");
        }
    }

    #[test]
    fn wide_dimensions_use_the_fallback_sampler() {
        let e = h_monte_carlo(200, 20_000, 1, 5).unwrap();
        assert!((e.h - 1.0 / 400.0).abs() < 4.0 * binomial_std_err(1.0 / 400.0, 20_000));
    }

    #[test]
    fn bulk_steps_match_single_steps() {
        use crate::stats::two_proportion_z;
        let (n, steps) = (100_000u64, 400);
        let bulk = h_monte_carlo(3, n, steps, 21).unwrap();
        let mut rng = substream(22, 0);
        let mut pos = vec![0; 3];
        let plain = (0..n).filter(|_| walk_hits_wide(&mut pos, steps, &mut rng)).count() as u64;
        let z = two_proportion_z((bulk.h * n as f64).round() as u64, n, plain, n);
        assert!(z.abs() < 4.0, "z = {z}");
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let a = h_monte_carlo(3, 5000, 1000, 42).unwrap();
        let b = h_monte_carlo(3, 5000, 1000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(h_monte_carlo(0, 10, 10, 0).is_err());
        assert!(h_monte_carlo(3, 10, 0, 0).is_err());
        assert!(h_harmonic_solve(3, 1, 1e-10).is_err());
        assert!(kesten_check(&[2, 3], 10, 10, 0).is_err());
    }

    #[test]
    fn one_dimensional_gamblers_ruin() {
        let sol = h_harmonic_solve(1, 10, DEFAULT_TOLERANCE).unwrap();
        for k in 0..10u32 {
            let c = CanonicalVertex::from_sorted([k]).unwrap();
            assert!((sol.value(&c) - (10 - k) as f64 / 10.0).abs() < 1e-9);
        }
        assert!((sol.estimate.h - 0.9).abs() < 1e-9);
        assert_eq!(sol.estimate.bracket, Some((sol.estimate.h, 1.0)));
    }

    #[test]
    fn origin_value_and_residual() {
        for (d, r) in [(2, 6), (3, 8), (5, 5)] {
            let sol = h_harmonic_solve(d, r, DEFAULT_TOLERANCE).unwrap();
            assert_eq!(sol.values[0], 1.0);
            assert!(sol.max_residual < DEFAULT_TOLERANCE);
            assert!(sol.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }

    #[test]
    fn bracket_contains_reference_values() {
        for (d, r, h) in [(3, 12, H3), (4, 8, H4), (5, 6, H5), (6, 5, H6)] {
            let sol = h_harmonic_solve(d, r, DEFAULT_TOLERANCE).unwrap();
            let (lo, hi) = sol.estimate.bracket.unwrap();
            assert!(lo <= h && h <= hi, "d={d} R={r}: [{lo}, {hi}] vs {h}");
            assert!(hi < 1.0, "certificate should be informative in d={d}");
        }
    }

    #[test]
    fn bracket_narrows_with_radius() {
        let a = h_harmonic_solve(3, 8, DEFAULT_TOLERANCE).unwrap().estimate.bracket.unwrap();
        let b = h_harmonic_solve(3, 16, DEFAULT_TOLERANCE).unwrap().estimate.bracket.unwrap();
        assert!(b.0 >= a.0 && b.1 - b.0 < a.1 - a.0, "{a:?} {b:?}");
    }

    #[test]
    fn power_condition_matches_direct_check() {
        // Direct evaluation of the discrete Laplacian of |x|^(-2 beta) on a
        // shell of points beyond the analytic threshold.
        for (d, beta, r) in [(3, 0.2, 9), (4, 0.5, 8), (6, 0.9, 9)] {
            let s0 = ((r + 1) * (r + 1)) as f64;
            assert!(power_superharmonic_from(d, beta, s0));
            for c in nonincreasing_sequences(d, r + 1..=r + 2) {
                let f = |c: &CanonicalVertex| (c.squared_norm() as f64).powf(-beta);
                let avg: f64 = c.lattice_neighbors().map(|n| f(&n)).sum::<f64>() / (2 * d) as f64;
                assert!(avg <= f(&c), "{c:?}");
            }
        }
        assert!(!power_superharmonic_from(3, 0.6, 1e6));
    }

    #[test]
    fn monte_carlo_agrees_with_harmonic_bracket() {
        for d in 3..=6 {
            let sol = h_harmonic_solve(d, 8, DEFAULT_TOLERANCE).unwrap();
            let (lo, hi) = sol.estimate.bracket.unwrap();
            let mc = h_monte_carlo(d, 40_000, 5_000, d as u64).unwrap();
            let se = mc.std_err.unwrap();
            assert!(mc.h > lo - 3.0 * se - 0.01 && mc.h < hi + 3.0 * se, "d={d}: {mc:?} vs [{lo}, {hi}]");
        }
    }

    #[test]
    fn b_lambda_positive_from_dimension_four() {
        for d in 4..=7 {
            let sol = h_harmonic_solve(d, 6, DEFAULT_TOLERANCE).unwrap();
            assert!(b_lambda(2.0, sol.estimate.bracket.unwrap().1) > 0.0, "d={d}");
        }
        // At d = 3 the hitting probability exceeds 1/4 and b is negative.
        assert!(b_lambda(2.0, H3) < 0.0);
    }

    #[test]
    fn kesten_rows() {
        let rep = kesten_check(&[5, 3, 4], 20_000, 2_000, 7).unwrap();
        assert_eq!(rep.rows.iter().map(|r| r.dim).collect::<Vec<_>>(), vec![3, 4, 5]);
        assert!(rep.monotone);
        assert!(rep.rows.iter().all(|r| r.in_band.is_none()));
        assert!((rep.rows[0].two_d_h - 6.0 * rep.rows[0].h).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn monte_carlo_is_a_probability(d in 1usize..12, steps in 1u64..200, seed: u64) {
            let e = h_monte_carlo(d, 500, steps, seed).unwrap();
            prop_assert!((0.0..=1.0).contains(&e.h));
            prop_assert!(e.std_err.is_some() && e.bracket.is_none());
        }
    }
}
