//! Subcommand drivers. Each validates its merged arguments, runs the core
//! routines, writes a table, and reports bound violations as an error after
//! the output is written.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use contact_core::analytics::{
    best_combined_lower_bound, combined_lower_bound, half_mean_field_bound, second_moment_lower_bound,
    lower_walk_rate, mean_field_survival, reach_probability, solve_mean_field_ode, BoundParams, LowerBound,
};
use contact_core::bcpp::{first_moment_check, run_coupled};
use contact_core::contact::{duality_check, estimate_survival, ContactParams};
use contact_core::moments::{evolve_f, second_moment_bound_check, verify_l, EigenvectorL, GOperator};
use contact_core::rng::derive_seed;
use contact_core::walk::{h_harmonic_solve, h_monte_carlo, Truncation, DEFAULT_TOLERANCE};
use contact_core::{CanonicalVertex, Error, Geometry, Torus};
use serde::{Deserialize, Serialize};

use crate::args::{
    BoundArgs, CampaignArgs, Cli, Command, Format, GlobalArgs, HittingArgs, HittingMethod, MomentsArgs, OdeArgs,
    SurvivalArgs, TorusArgs,
};
use crate::config::{merge, ConfigFile};
use crate::output::{aligned, emit, opt, Record};
use crate::CliError;

/// Options shared by every subcommand after merging with the config file.
struct Context {
    seed: u64,
    out: Option<PathBuf>,
    format: Format,
}

impl Context {
    /// Write the table; with an output file also print it aligned to stdout.
    fn write<R: Record + Serialize>(&self, formula: &str, rows: &[R]) -> Result<(), CliError> {
        emit(formula, rows, self.format, self.out.as_deref())?;
        if self.out.is_some() {
            print!("{}", aligned(rows));
        }
        Ok(())
    }
}

fn violations(found: Vec<String>) -> Result<(), CliError> {
    if found.is_empty() {
        Ok(())
    } else {
        Err(CliError::Violation(found.join("; ")))
    }
}

fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required option --{name}")))
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.global.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let global: GlobalArgs = merge(&cli.global, file.globals(), "top level")?;
    if let Some(jobs) = global.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be >= 1".into()));
        }
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let ctx = Context { seed: global.seed.unwrap_or(0), out: global.out, format: global.format.unwrap_or_default() };
    let section = file.section(cli.command.section());
    let scope = cli.command.section();
    match &cli.command {
        Command::Survival(a) => survival(&ctx, &merge(a, &section, scope)?),
        Command::Campaign(a) => campaign(&ctx, &merge(a, &section, scope)?),
        Command::Ode(a) => ode(&ctx, &merge(a, &section, scope)?),
        Command::Bound(a) => bound(&ctx, &merge(a, &section, scope)?),
        Command::Hitting(a) => hitting(&ctx, &merge(a, &section, scope)?),
        Command::Duality(a) => duality(&ctx, &merge(a, &section, scope)?),
        Command::BcppCheck(a) => bcpp_check(&ctx, &merge(a, &section, scope)?),
        Command::Moments(a) => moments(&ctx, &merge(a, &section, scope)?),
    }
}

/// One `(lambda, d)` cell of a survival grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub lambda: f64,
    pub d: usize,
    pub p_hat: f64,
    pub std_err: f64,
    pub n_censored: u64,
    /// Combined lower bound with `H` from the harmonic solve; 0 when vacuous.
    pub lower_bound: f64,
    /// `(lambda - 1) / lambda`, or 0 for `lambda <= 1`.
    pub upper_bound: f64,
    /// Half the upper bound.
    pub griffeath_bound: f64,
    /// Upper end of the harmonic-solve bracket for `H(d)`.
    #[serde(rename = "H_estimate")]
    pub h_estimate: f64,
    #[serde(rename = "K_used")]
    pub k_used: u64,
    pub seed: u64,
}

impl ResultRow {
    pub fn within_bounds(&self) -> bool {
        let s = 3.0 * self.std_err;
        self.lower_bound - s <= self.p_hat && self.p_hat <= self.upper_bound + s
    }
}

impl Record for ResultRow {
    const COLUMNS: &'static [&'static str] = &[
        "lambda",
        "d",
        "p_hat",
        "std_err",
        "n_censored",
        "lower_bound",
        "upper_bound",
        "griffeath_bound",
        "H_estimate",
        "K_used",
        "seed",
    ];

    fn fields(&self, f: &dyn Fn(f64) -> String) -> Vec<String> {
        vec![
            f(self.lambda),
            self.d.to_string(),
            f(self.p_hat),
            f(self.std_err),
            self.n_censored.to_string(),
            f(self.lower_bound),
            f(self.upper_bound),
            f(self.griffeath_bound),
            f(self.h_estimate),
            self.k_used.to_string(),
            self.seed.to_string(),
        ]
    }
}

const SURVIVAL_FORMULA: &str = "lower_bound - 3 std_err <= P(eta^{O} reaches K_surv) <= (lambda - 1)/lambda + 3 std_err; \
lower_bound = P(walk reaches K) * K^2 (lambda-1-2 lambda H) / ((K^2-K)(lambda-1)(1-H) + 2 K lambda (1-H))";

struct SurvivalPlan {
    lambdas: Vec<f64>,
    dims: Vec<usize>,
    trials: u64,
    horizon: f64,
    threshold: usize,
    level: Option<u64>,
    radius: u32,
}

impl SurvivalPlan {
    fn new(a: &SurvivalArgs) -> Result<Self, CliError> {
        let plan = SurvivalPlan {
            lambdas: require(a.lambda.clone(), "lambda")?,
            dims: require(a.d.clone(), "d")?,
            trials: a.trials.unwrap_or(2000),
            horizon: a.horizon.unwrap_or(200.0),
            threshold: a.threshold.unwrap_or(500),
            level: a.level,
            radius: a.radius.unwrap_or(10),
        };
        if plan.lambdas.is_empty() || plan.dims.is_empty() {
            return Err(CliError::Usage("--lambda and --d grids must be nonempty".into()));
        }
        if plan.trials == 0 {
            return Err(CliError::Usage("--trials must be >= 1".into()));
        }
        if plan.level == Some(0) {
            return Err(CliError::Usage("--level must be >= 1".into()));
        }
        Ok(plan)
    }

    fn cells(&self) -> impl Iterator<Item = (u64, f64, usize)> + '_ {
        self.lambdas
            .iter()
            .flat_map(move |&l| self.dims.iter().map(move |&d| (l, d)))
            .enumerate()
            .map(|(i, (l, d))| (i as u64, l, d))
    }
}

/// Upper end of the certified bracket; 1 in recurrent dimensions.
fn hitting_upper(d: usize, radius: u32) -> Result<f64, CliError> {
    if d <= 2 {
        return Ok(1.0);
    }
    let sol = h_harmonic_solve(d, radius, DEFAULT_TOLERANCE)?;
    Ok(sol.estimate.bracket.expect("harmonic solve carries a bracket").1)
}

fn lower_bound(lambda: f64, d: usize, h: f64, level: Option<u64>) -> Result<(u64, LowerBound), CliError> {
    let vacuous = LowerBound { value: 0.0, vacuous: true };
    if h >= 1.0 || lambda <= 0.0 {
        return Ok((level.unwrap_or(1), vacuous));
    }
    let dim = Some(d as u32);
    Ok(match level {
        Some(k) => (k, combined_lower_bound(lambda, dim, h, k)?),
        None => best_combined_lower_bound(lambda, dim, h, (2 * d as u64 - 1).max(1))?,
    })
}

fn survival_rows(plan: &SurvivalPlan, seed: u64) -> Result<Vec<ResultRow>, CliError> {
    let mut hitting = BTreeMap::new();
    let mut rows = Vec::new();
    for (cell, lambda, d) in plan.cells() {
        let cell_seed = derive_seed(seed, cell);
        let h = match hitting.get(&d) {
            Some(&h) => h,
            None => *hitting.entry(d).or_insert(hitting_upper(d, plan.radius)?),
        };
        let params = ContactParams::lattice(lambda, d)?;
        let est = estimate_survival(&params, plan.trials, plan.horizon, plan.threshold, cell_seed)?;
        let (k_used, lower) = lower_bound(lambda, d, h, plan.level)?;
        rows.push(ResultRow {
            lambda,
            d,
            p_hat: est.p_hat,
            std_err: est.std_err,
            n_censored: est.n_censored,
            lower_bound: lower.value,
            upper_bound: mean_field_survival(lambda),
            griffeath_bound: half_mean_field_bound(lambda),
            h_estimate: h,
            k_used,
            seed: cell_seed,
        });
    }
    Ok(rows)
}

fn row_violations(rows: &[ResultRow]) -> Vec<String> {
    rows.iter()
        .filter(|r| !r.within_bounds())
        .map(|r| format!("lambda={} d={}: p_hat {} outside [{}, {}] +- 3 sigma", r.lambda, r.d, r.p_hat, r.lower_bound, r.upper_bound))
        .collect()
}

fn survival(ctx: &Context, a: &SurvivalArgs) -> Result<(), CliError> {
    let plan = SurvivalPlan::new(a)?;
    let rows = survival_rows(&plan, ctx.seed)?;
    ctx.write(SURVIVAL_FORMULA, &rows)?;
    violations(row_violations(&rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub series: f64,
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
}

impl Record for PlotRow {
    const COLUMNS: &'static [&'static str] = &["series", "x", "y", "sigma"];
    fn fields(&self, f: &dyn Fn(f64) -> String) -> Vec<String> {
        vec![f(self.series), f(self.x), f(self.y), f(self.sigma)]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityRow {
    pub lambda: f64,
    pub d: usize,
    pub torus_side: u32,
    pub time: f64,
    pub trials: u64,
    pub p_single_survives: f64,
    pub p_full_covers_origin: f64,
    pub z_score: f64,
    pub seed: u64,
}

impl Record for DualityRow {
    const COLUMNS: &'static [&'static str] = &[
        "lambda",
        "d",
        "torus_side",
        "time",
        "trials",
        "p_single_survives",
        "p_full_covers_origin",
        "z_score",
        "seed",
    ];
    fn fields(&self, f: &dyn Fn(f64) -> String) -> Vec<String> {
        vec![
            f(self.lambda),
            self.d.to_string(),
            self.torus_side.to_string(),
            f(self.time),
            self.trials.to_string(),
            f(self.p_single_survives),
            f(self.p_full_covers_origin),
            f(self.z_score),
            self.seed.to_string(),
        ]
    }
}

const DUALITY_FORMULA: &str = "P(eta_t^{O} != empty) = P(O in eta_t^{full}) on the torus; two-proportion z";

fn torus_params(lambda: f64, d: usize, side: u32) -> Result<ContactParams, CliError> {
    Ok(ContactParams::new(lambda, Geometry::Torus(Torus::new(d, side)?))?)
}

fn duality_row(lambda: f64, d: usize, side: u32, time: f64, trials: u64, seed: u64) -> Result<DualityRow, CliError> {
    let rep = duality_check(&torus_params(lambda, d, side)?, time, trials, seed)?;
    Ok(DualityRow {
        lambda,
        d,
        torus_side: side,
        time,
        trials,
        p_single_survives: rep.p_single_survives,
        p_full_covers_origin: rep.p_full_covers_origin,
        z_score: rep.z_score,
        seed,
    })
}

/// `results.csv` -> `results.<tag>.csv`.
fn sibling(out: &Path, tag: &str, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    out.with_extension(format!("{tag}.{ext}"))
}

fn campaign(ctx: &Context, a: &CampaignArgs) -> Result<(), CliError> {
    let plan = SurvivalPlan::new(&a.survival)?;
    let rows = survival_rows(&plan, ctx.seed)?;
    ctx.write(SURVIVAL_FORMULA, &rows)?;
    let mut found = row_violations(&rows);

    let plot: Vec<PlotRow> = rows
        .iter()
        .map(|r| PlotRow { series: r.lambda, x: r.d as f64, y: r.p_hat, sigma: r.std_err })
        .collect();
    let plot_path = a.plot.clone().or_else(|| ctx.out.as_deref().map(|o| sibling(o, "plot", ctx.format)));
    let plot_formula = "x = d, y = p_hat, sigma = std_err, series = lambda";
    match &plot_path {
        Some(p) => emit(plot_formula, &plot, ctx.format, Some(p))?,
        None => emit(plot_formula, &plot, ctx.format, None)?,
    }

    if let Some(side) = a.torus_side {
        let time = a.time.unwrap_or(3.0);
        let dual = plan
            .cells()
            .map(|(cell, lambda, d)| {
                duality_row(lambda, d, side, time, plan.trials, derive_seed(derive_seed(ctx.seed, cell), 1))
            })
            .collect::<Result<Vec<_>, _>>()?;
        found.extend(
            dual.iter()
                .filter(|r| r.z_score.abs() >= 3.0)
                .map(|r| format!("duality lambda={} d={}: |z| = {}", r.lambda, r.d, r.z_score.abs())),
        );
        let path = ctx.out.as_deref().map(|o| sibling(o, "duality", ctx.format));
        emit(DUALITY_FORMULA, &dual, ctx.format, path.as_deref())?;
    }
    violations(found)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeRow {
    pub t: f64,
    pub f: f64,
}

impl Record for OdeRow {
    const COLUMNS: &'static [&'static str] = &["t", "f"];
    fn fields(&self, fmt: &dyn Fn(f64) -> String) -> Vec<String> {
        vec![fmt(self.t), fmt(self.f)]
    }
}

fn ode(ctx: &Context, a: &OdeArgs) -> Result<(), CliError> {
    let lambda = require(a.lambda, "lambda")?;
    let t_end = a.t_end.unwrap_or(20.0);
    let stride = a.stride.unwrap_or(100).max(1);
    let sol = solve_mean_field_ode(lambda, t_end, a.dt.unwrap_or(1e-3))?;
    let last = sol.times.len() - 1;
    let rows: Vec<OdeRow> = (0..=last)
        .filter(|&i| i % stride == 0 || i == last)
        .map(|i| OdeRow { t: sol.times[i], f: sol.values[i] })
        .collect();
    let formula = format!(
        "f' = -f + lambda f (1 - f), f(0) = 1, RK4; lambda = {lambda}, fixed point max(0, (lambda-1)/lambda) = {}",
        sol.fixed_point
    );
    emit(&formula, &rows, ctx.format, ctx.out.as_deref())?;
    if ctx.out.is_some() {
        println!("f({t_end}) = {:.12}, fixed point {:.12}", sol.final_value(), sol.fixed_point);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub lambda: f64,
    /// `None` is the `d -> infinity` limit.
    pub d: Option<u32>,
    pub hitting: f64,
    pub set_size: u64,
    pub level: u64,
    pub lemma_bound: f64,
    pub lemma_vacuous: bool,
    pub reach_probability: f64,
    pub combined_bound: f64,
    pub upper_bound: f64,
    pub griffeath_bound: f64,
}

impl Record for BoundRow {
    const COLUMNS: &'static [&'static str] = &[
        "lambda",
        "d",
        "hitting",
        "set_size",
        "level",
        "lemma_bound",
        "lemma_vacuous",
        "reach_probability",
        "combined_bound",
        "upper_bound",
        "griffeath_bound",
    ];
    fn fields(&self, f: &dyn Fn(f64) -> String) -> Vec<String> {
        vec![
            f(self.lambda),
            self.d.map_or_else(|| "inf".to_string(), |d| d.to_string()),
            f(self.hitting),
            self.set_size.to_string(),
            self.level.to_string(),
            f(self.lemma_bound),
            self.lemma_vacuous.to_string(),
            f(self.reach_probability),
            f(self.combined_bound),
            f(self.upper_bound),
            f(self.griffeath_bound),
        ]
    }
}

fn bound(ctx: &Context, a: &BoundArgs) -> Result<(), CliError> {
    let lambda = require(a.lambda, "lambda")?;
    let hitting = a.hitting.unwrap_or(0.0);
    let set_size = a.set_size.unwrap_or(1);
    let level = a.level.unwrap_or(1);
    if level == 0 {
        return Err(CliError::Usage("--level must be >= 1".into()));
    }
    let lemma = second_moment_lower_bound(&BoundParams { lambda, dim: a.d, hitting, set_size, level })?;
    let reach = if lower_walk_rate(lambda, a.d, level) > 0.0 { reach_probability(lambda, a.d, level)? } else { 0.0 };
    let combined = combined_lower_bound(lambda, a.d, hitting, level)?;
    let row = BoundRow {
        lambda,
        d: a.d,
        hitting,
        set_size,
        level,
        lemma_bound: lemma.value,
        lemma_vacuous: lemma.vacuous,
        reach_probability: reach,
        combined_bound: combined.value,
        upper_bound: mean_field_survival(lambda),
        griffeath_bound: half_mean_field_bound(lambda),
    };
    let formula = "lemma = |A|^2 (lambda-1-2 lambda H) / ((|A|^2-|A|)(lambda-1)(1-H) + 2|A| lambda (1-H)); \
combined = P(walk with up-rate lambda (1-K/2d) reaches K) * lemma(|A| = K)";
    ctx.write(formula, &[row])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingRow {
    pub d: usize,
    pub method: String,
    pub h: f64,
    pub std_err: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub truncation: String,
    pub two_d_h: f64,
    pub seed: Option<u64>,
}

impl Record for HittingRow {
    const COLUMNS: &'static [&'static str] =
        &["d", "method", "h", "std_err", "lower", "upper", "truncation", "two_d_h", "seed"];
    fn fields(&self, f: &dyn Fn(f64) -> String) -> Vec<String> {
        vec![
            self.d.to_string(),
            self.method.clone(),
            f(self.h),
            opt(self.std_err, f),
            opt(self.lower, f),
            opt(self.upper, f),
            self.truncation.clone(),
            f(self.two_d_h),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
        ]
    }
}

fn truncation(t: Truncation) -> String {
    match t {
        Truncation::Steps(n) => format!("steps={n}"),
        Truncation::Radius(r) => format!("radius={r}"),
    }
}

fn hitting(ctx: &Context, a: &HittingArgs) -> Result<(), CliError> {
    let dims = require(a.d.clone(), "d")?;
    let method = a.method.unwrap_or(HittingMethod::Both);
    let mut rows = Vec::new();
    for &d in &dims {
        if matches!(method, HittingMethod::MonteCarlo | HittingMethod::Both) {
            let seed = derive_seed(ctx.seed, d as u64);
            let e = h_monte_carlo(d, a.trials.unwrap_or(100_000), a.max_steps.unwrap_or(10_000), seed)?;
            rows.push(HittingRow {
                d,
                method: "monte-carlo".into(),
                h: e.h,
                std_err: e.std_err,
                lower: None,
                upper: None,
                truncation: truncation(e.truncation),
                two_d_h: 2.0 * d as f64 * e.h,
                seed: Some(seed),
            });
        }
        if matches!(method, HittingMethod::Harmonic | HittingMethod::Both) {
            let sol = h_harmonic_solve(d, a.radius.unwrap_or(12), a.tolerance.unwrap_or(DEFAULT_TOLERANCE))?;
            let e = sol.estimate;
            rows.push(HittingRow {
                d,
                method: "harmonic-solve".into(),
                h: e.h,
                std_err: None,
                lower: e.bracket.map(|b| b.0),
                upper: e.bracket.map(|b| b.1),
                truncation: truncation(e.truncation),
                two_d_h: 2.0 * d as f64 * e.h,
                seed: None,
            });
        }
    }
    ctx.write("H(d) = P(simple random walk from e_1 visits O); h(O) = 1, h = mean of h over neighbors off O", &rows)
}

struct TorusPlan {
    lambda: f64,
    d: usize,
    side: u32,
    time: f64,
    trials: u64,
}

impl TorusPlan {
    fn new(a: &TorusArgs) -> Result<Self, CliError> {
        Ok(TorusPlan {
            lambda: require(a.lambda, "lambda")?,
            d: require(a.d, "d")?,
            side: a.torus_side.unwrap_or(8),
            time: a.time.unwrap_or(3.0),
            trials: a.trials.unwrap_or(10_000),
        })
    }
}

fn duality(ctx: &Context, a: &TorusArgs) -> Result<(), CliError> {
    let p = TorusPlan::new(a)?;
    let row = duality_row(p.lambda, p.d, p.side, p.time, p.trials, ctx.seed)?;
    ctx.write(DUALITY_FORMULA, std::slice::from_ref(&row))?;
    if row.z_score.abs() >= 3.0 {
        return Err(CliError::Violation(format!("|z| = {} >= 3", row.z_score.abs())));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcppRow {
    pub check: String,
    pub lambda: f64,
    pub d: usize,
    pub torus_side: u32,
    pub time: f64,
    pub trials: u64,
    /// Mismatching trials for the coupling; the mean of `zeta_t(O)` otherwise.
    pub value: f64,
    pub std_err: Option<f64>,
    pub events: Option<u64>,
    pub seed: u64,
}

impl Record for BcppRow {
    const COLUMNS: &'static [&'static str] =
        &["check", "lambda", "d", "torus_side", "time", "trials", "value", "std_err", "events", "seed"];
    fn fields(&self, f: &dyn Fn(f64) -> String) -> Vec<String> {
        vec![
            self.check.clone(),
            f(self.lambda),
            self.d.to_string(),
            self.torus_side.to_string(),
            f(self.time),
            self.trials.to_string(),
            f(self.value),
            opt(self.std_err, f),
            self.events.map(|e| e.to_string()).unwrap_or_default(),
            self.seed.to_string(),
        ]
    }
}

fn bcpp_check(ctx: &Context, a: &TorusArgs) -> Result<(), CliError> {
    let p = TorusPlan::new(a)?;
    let params = torus_params(p.lambda, p.d, p.side)?;
    let coupling_seed = derive_seed(ctx.seed, 0);
    let mut events = 0;
    let mut mismatched = 0u64;
    for trial in 0..p.trials {
        match run_coupled(&params, p.time, 0, derive_seed(coupling_seed, trial)) {
            Ok(run) => events += run.events,
            Err(Error::InvariantViolation(_)) => mismatched += 1,
            Err(e) => return Err(e.into()),
        }
    }
    let moment_seed = derive_seed(ctx.seed, 1);
    let m = first_moment_check(&params, p.time, p.trials, moment_seed)?;
    let base = |check: &str, value, std_err, events, seed| BcppRow {
        check: check.into(),
        lambda: p.lambda,
        d: p.d,
        torus_side: p.side,
        time: p.time,
        trials: p.trials,
        value,
        std_err,
        events,
        seed,
    };
    let rows = [
        base("coupling-mismatches", mismatched as f64, None, Some(events), coupling_seed),
        base("first-moment", m.mean, Some(m.std_err), None, moment_seed),
    ];
    ctx.write("support(zeta_t) = eta_t under shared events; E zeta_t(O) = 1 from zeta_0 = 1", &rows)?;
    let mut found = Vec::new();
    if mismatched > 0 {
        found.push(format!("{mismatched} coupled trials lost support equality"));
    }
    let moment_ok = if m.std_err == 0.0 { m.mean == 1.0 } else { (m.mean - 1.0).abs() < 3.0 * m.std_err };
    if !moment_ok {
        found.push(format!("E zeta_t(O) = {} (sigma {}) differs from 1", m.mean, m.std_err));
    }
    violations(found)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsRow {
    pub set_size: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub survival_bound: f64,
    pub lemma_bound: f64,
    pub holds: bool,
}

impl Record for MomentsRow {
    const COLUMNS: &'static [&'static str] = &["set_size", "lhs", "rhs", "survival_bound", "lemma_bound", "holds"];
    fn fields(&self, f: &dyn Fn(f64) -> String) -> Vec<String> {
        vec![
            self.set_size.to_string(),
            f(self.lhs),
            f(self.rhs),
            f(self.survival_bound),
            f(self.lemma_bound),
            self.holds.to_string(),
        ]
    }
}

fn moments(ctx: &Context, a: &MomentsArgs) -> Result<(), CliError> {
    let lambda = require(a.lambda, "lambda")?;
    let d = require(a.d, "d")?;
    let radius = a.radius.unwrap_or(10);
    let t = a.time.unwrap_or(1.0);
    let op = GOperator::new(lambda, d, radius)?;
    let ev = evolve_f(&op, t, a.dt)?;
    let sol = h_harmonic_solve(d, radius, DEFAULT_TOLERANCE)?;
    let residual = verify_l(&op, &EigenvectorL::matched(&sol, lambda), 1e-8)?;
    let f_at = |c: &CanonicalVertex| ev.field.get(&op, c).expect("inside ball");
    eprintln!(
        "F_t(O) = {:.10}, F_t(e_1) = {:.10}; G L residual {:.3e} (interior), {:.3e} (origin); {} RK4 steps",
        f_at(&CanonicalVertex::origin(d)),
        f_at(&CanonicalVertex::unit(d)),
        residual.interior,
        residual.origin,
        ev.steps
    );
    let h = sol.estimate.bracket.expect("bracket").1;
    let rows: Vec<MomentsRow> = second_moment_bound_check(lambda, d, radius, t, a.set_size.unwrap_or(3), h)?
        .into_iter()
        .map(|r| MomentsRow {
            set_size: r.set_size,
            lhs: r.lhs,
            rhs: r.rhs,
            survival_bound: r.survival_bound,
            lemma_bound: r.lemma_bound,
            holds: r.holds(1e-6),
        })
        .collect();
    let formula = "sum_{x,y in A} F_t(x-y) <= ((|A|^2-|A|)(H+b) + |A|(1+b))/b, b = (lambda-1-2 lambda H)/(lambda+1), dF/dt = G F";
    ctx.write(formula, &rows)?;
    violations(
        rows.iter()
            .filter(|r| !r.holds)
            .map(|r| format!("|A|={}: lhs {} > rhs {}", r.set_size, r.lhs, r.rhs))
            .collect(),
    )
}
