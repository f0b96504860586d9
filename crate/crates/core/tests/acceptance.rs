//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion followed
//! by its individual checks, and exits nonzero if any check fails that is not
//! listed as known-unattainable.
//!
//! Seeds are fixed below; every cell derives its own stream from them.

use std::process::ExitCode;
use std::time::Instant;

use contact_core::analytics::{
    best_combined_lower_bound, combined_lower_bound, half_mean_field_bound, mean_field_survival,
    solve_mean_field_ode,
};
use contact_core::bcpp::{correlation_estimate, first_moment_check, run_coupled};
use contact_core::contact::{duality_check, estimate_survival, ContactParams};
use contact_core::moments::{evolve_f, second_moment_bound_check, verify_l, EigenvectorL, GOperator};
use contact_core::rng::derive_seed;
use contact_core::walk::{h_harmonic_solve, h_monte_carlo, kesten_check, DEFAULT_TOLERANCE, KESTEN_BAND};
use contact_core::{CanonicalVertex, Geometry, Torus};

const SEED: u64 = 0x5eed_2026;

/// `H(3) = 1 - 1/G(0)` with `G(0) = int_0^inf e^{-t} I_0(t/3)^3 dt`, evaluated
/// by 30-digit quadrature.
const H3_REFERENCE: f64 = 0.340537329550999;

struct Check {
    label: String,
    ok: bool,
    known: Option<&'static str>,
}

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<Check>,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Criterion { id, title, checks: Vec::new() }
    }

    fn check(&mut self, ok: bool, label: impl Into<String>) {
        self.checks.push(Check { label: label.into(), ok, known: None });
    }

    /// A check expected to fail for a documented reason. It is still
    /// evaluated and printed as it comes out.
    fn check_known(&mut self, ok: bool, label: impl Into<String>, reason: &'static str) {
        self.checks.push(Check { label: label.into(), ok, known: Some(reason) });
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    fn report(&self, seconds: f64) {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {:>2}: {} ({seconds:.1} s)", self.id, self.title);
        for c in &self.checks {
            let mark = match (c.ok, c.known) {
                (true, _) => "ok  ".to_string(),
                (false, None) => "FAIL".to_string(),
                (false, Some(reason)) => format!("FAIL (known: {reason})"),
            };
            println!("    {mark} {}", c.label);
        }
    }
}

fn torus_params(lambda: f64, dim: usize, side: u32) -> ContactParams {
    ContactParams::new(lambda, Geometry::Torus(Torus::new(dim, side).expect("valid torus"))).expect("valid params")
}

fn sandwich() -> Criterion {
    let mut c = Criterion::new(1, "survival sandwich at lambda = 2, d in {4, 6, 8}");
    let (lambda, trials, threshold, horizon, level) = (2.0, 2000, 500, 200.0, 20);
    for (cell, d) in [4usize, 6, 8].into_iter().enumerate() {
        let cell_seed = derive_seed(SEED, 100 + cell as u64);
        let h = h_monte_carlo(d, 1_000_000, 10_000, derive_seed(cell_seed, 0)).expect("walk").h;
        let params = ContactParams::lattice(lambda, d).expect("params");
        let est = estimate_survival(&params, trials, horizon, threshold, derive_seed(cell_seed, 1)).expect("trials");
        let sigma = est.std_err;
        let lower = combined_lower_bound(lambda, Some(d as u32), h, level).expect("bound");
        let (best_k, best) = best_combined_lower_bound(lambda, Some(d as u32), h, 2 * d as u64 - 1).expect("bound");
        let upper = mean_field_survival(lambda);
        c.check(
            lower.value - 3.0 * sigma <= est.p_hat && est.p_hat <= upper + 3.0 * sigma,
            format!(
                "d={d}: H_mc={h:.5} lower(K={level})={:.5}{} <= p_hat={:.4} (sigma {sigma:.4}, censored {}) <= {upper}",
                lower.value,
                if lower.vacuous { " [vacuous]" } else { "" },
                est.p_hat,
                est.n_censored
            ),
        );
        c.check(
            best.value - 3.0 * sigma <= est.p_hat,
            format!("d={d}: best combined lower bound {:.5} at K={best_k} <= p_hat + 3 sigma", best.value),
        );
        if d == 8 {
            let half = half_mean_field_bound(lambda);
            c.check(
                est.p_hat > half + 3.0 * sigma,
                format!("d=8: p_hat={:.4} > {half} + 3 sigma = {:.4}", est.p_hat, half + 3.0 * sigma),
            );
        }
    }
    c
}

fn subcritical() -> Criterion {
    let mut c = Criterion::new(2, "subcritical extinction at lambda = 0.8");
    for (cell, d) in [2usize, 6].into_iter().enumerate() {
        let params = ContactParams::lattice(0.8, d).expect("params");
        let est = estimate_survival(&params, 2000, 200.0, 500, derive_seed(SEED, 200 + cell as u64)).expect("trials");
        c.check(
            est.n_reached == 0 && est.n_censored == 0,
            format!("d={d}: {} threshold hits, {} censored in 2000 trials", est.n_reached, est.n_censored),
        );
    }
    c
}

/// Closed-form solution of `f' = -f + lambda f (1 - f)`, `f(0) = 1`.
fn bernoulli(lambda: f64, t: f64) -> f64 {
    if lambda == 1.0 {
        return 1.0 / (1.0 + t);
    }
    let g = lambda - 1.0;
    g / (lambda - (-g * t).exp())
}

fn mean_field_ode() -> Criterion {
    let mut c = Criterion::new(3, "mean-field ODE against closed form");
    for lambda in [0.5, 1.0, 2.0, 4.0] {
        let sol = solve_mean_field_ode(lambda, 20.0, 1e-3).expect("ode");
        let err = sol
            .times
            .iter()
            .zip(&sol.values)
            .map(|(&t, &f)| (f - bernoulli(lambda, t)).abs())
            .fold(0.0, f64::max);
        c.check(err < 1e-8, format!("lambda={lambda}: sup error {err:.3e} < 1e-8"));
    }
    c
}

fn hitting() -> Criterion {
    let mut c = Criterion::new(4, "hitting probabilities");
    let mc = h_monte_carlo(3, 1_000_000, 100_000, derive_seed(SEED, 400)).expect("walk");
    let se = mc.std_err.expect("monte carlo carries std_err");
    c.check(
        (mc.h - H3_REFERENCE).abs() < 3.0 * se,
        format!("d=3 Monte Carlo h={:.5} (sigma {se:.5}) vs reference {H3_REFERENCE:.5}", mc.h),
    );
    let sol = h_harmonic_solve(3, 20, DEFAULT_TOLERANCE).expect("harmonic solve");
    let (lo, hi) = sol.estimate.bracket.expect("harmonic solve carries bracket");
    c.check(
        lo <= H3_REFERENCE && H3_REFERENCE <= hi,
        format!("d=3 R=20 bracket [{lo:.5}, {hi:.5}] contains {H3_REFERENCE:.5}"),
    );
    let rep = kesten_check(&[8, 10], 1_000_000, 10_000, derive_seed(SEED, 401)).expect("kesten");
    for row in &rep.rows {
        let ok = row.in_band == Some(true);
        let label = format!(
            "d={}: 2d h = {:.4} (sigma {:.4}) in ({}, {})",
            row.dim,
            row.two_d_h,
            2.0 * row.dim as f64 * row.std_err,
            KESTEN_BAND.0,
            KESTEN_BAND.1
        );
        if row.dim == 8 {
            c.check_known(ok, label, "16 H(8) = 1.1666 by quadrature, above the band");
        } else {
            c.check(ok, label);
        }
    }
    c
}

fn coupling() -> Criterion {
    let mut c = Criterion::new(5, "BCPP support equals the coupled contact process");
    let params = torus_params(1.5, 2, 6);
    let mut events = 0;
    let mut failures = Vec::new();
    for trial in 0..100 {
        match run_coupled(&params, 5.0, 5, derive_seed(SEED, 500 + trial)) {
            Ok(run) => events += run.events,
            Err(e) => failures.push(format!("trial {trial}: {e}")),
        }
    }
    c.check(
        failures.is_empty(),
        format!("100 trials, {events} events compared, {} with a mismatch {failures:?}", failures.len()),
    );
    c
}

fn first_moment() -> Criterion {
    let mut c = Criterion::new(6, "first moment of the path process is 1");
    let mut cell = 0;
    for lambda in [0.5, 2.0] {
        for t in [0.5, 1.0, 2.0] {
            let params = torus_params(lambda, 2, 6);
            let m = first_moment_check(&params, t, 100_000, derive_seed(SEED, 600 + cell)).expect("moment");
            cell += 1;
            let ok = if m.std_err == 0.0 { m.mean == 1.0 } else { (m.mean - 1.0).abs() < 3.0 * m.std_err };
            c.check(ok, format!("lambda={lambda} t={t}: mean {:.5} (sigma {:.5})", m.mean, m.std_err));
        }
    }
    c
}

fn eigenvector() -> Criterion {
    let mut c = Criterion::new(7, "G L = 0 with matched truncated H");
    for lambda in [2.0, 3.0] {
        for d in [3usize, 4] {
            let sol = h_harmonic_solve(d, 10, DEFAULT_TOLERANCE).expect("harmonic solve");
            let l = EigenvectorL::matched(&sol, lambda);
            let op = GOperator::new(lambda, d, 10).expect("operator");
            match verify_l(&op, &l, 1e-8) {
                Ok(rep) => c.check(
                    rep.interior < 1e-8 && rep.origin < 1e-12,
                    format!(
                        "lambda={lambda} d={d}: interior residual {:.2e} < 1e-8, origin row {:.2e} < 1e-12",
                        rep.interior, rep.origin
                    ),
                ),
                Err(e) => c.check(false, format!("lambda={lambda} d={d}: {e}")),
            }
        }
    }
    c
}

fn second_moment() -> Criterion {
    let mut c = Criterion::new(8, "second-moment bound at lambda = 2");
    let radius = 10;
    for d in [3usize, 4] {
        let sol = h_harmonic_solve(d, radius, DEFAULT_TOLERANCE).expect("harmonic solve");
        let h = sol.estimate.bracket.expect("bracket").1;
        for t in [0.5, 1.0] {
            match second_moment_bound_check(2.0, d, radius, t, 3, h) {
                Ok(rows) => {
                    for row in rows {
                        c.check(
                            row.lhs <= row.rhs + 1e-6
                                && row.survival_bound >= row.lemma_bound - 1e-6
                                && (row.closed_form - row.lemma_bound).abs() < 1e-10,
                            format!(
                                "d={d} t={t} |A|={}: lhs {:.6} <= rhs {:.6}; |A|^2/lhs {:.6} >= lemma {:.6}; closed form gap {:.1e}",
                                row.set_size,
                                row.lhs,
                                row.rhs,
                                row.survival_bound,
                                row.lemma_bound,
                                (row.closed_form - row.lemma_bound).abs()
                            ),
                        );
                    }
                }
                Err(e) if d == 3 => {
                    c.check_known(false, format!("d=3 t={t}: {e}"), "H(3) > 1/4 so b_lambda < 0 at lambda = 2")
                }
                Err(e) => c.check(false, format!("d={d} t={t}: {e}")),
            }
        }
    }
    c
}

fn duality() -> Criterion {
    let mut c = Criterion::new(9, "self-duality on the torus");
    let params = torus_params(1.5, 2, 8);
    let rep = duality_check(&params, 3.0, 10_000, derive_seed(SEED, 900)).expect("duality");
    c.check(
        rep.z_score.abs() < 3.0,
        format!(
            "P(survive from O) {:.4} vs P(O occupied from full) {:.4}: |z| = {:.2} < 3",
            rep.p_single_survives,
            rep.p_full_covers_origin,
            rep.z_score.abs()
        ),
    );
    c
}

fn cross_oracle() -> Criterion {
    let mut c = Criterion::new(10, "correlation ODE against path-process Monte Carlo");
    let (lambda, d, t) = (2.0, 3, 1.0);
    let op = GOperator::new(lambda, d, 8).expect("operator");
    let field = evolve_f(&op, t, None).expect("evolve").field;
    let classes = [CanonicalVertex::origin(d), CanonicalVertex::unit(d)];
    let mc = correlation_estimate(&torus_params(lambda, d, 16), t, &classes, 4000, derive_seed(SEED, 1000))
        .expect("correlation");
    for (class, est) in classes.iter().zip(&mc) {
        let f = field.get(&op, class).expect("inside ball");
        c.check(
            (est.mean - f).abs() < 3.0 * est.std_err,
            format!("u={class:?}: F_t(u) = {f:.5}, Monte Carlo {:.5} (sigma {:.5})", est.mean, est.std_err),
        );
    }
    c
}

fn main() -> ExitCode {
    let suite: [fn() -> Criterion; 10] = [
        sandwich,
        subcritical,
        mean_field_ode,
        hitting,
        coupling,
        first_moment,
        eigenvector,
        second_moment,
        duality,
        cross_oracle,
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for run in suite {
        let start = Instant::now();
        let criterion = run();
        criterion.report(start.elapsed().as_secs_f64());
        passed += criterion.passed() as usize;
        unexpected += criterion.checks.iter().filter(|c| !c.ok && c.known.is_none()).count();
    }
    println!("acceptance: {passed}/{} criteria pass, {unexpected} unexpected check failures", suite.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
