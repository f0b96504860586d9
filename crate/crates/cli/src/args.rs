//! Command-line definitions.
//!
//! Every subcommand field is optional so that a config-file section can fill
//! it; the config keys are the long flag names. Defaults apply after merging.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

const ROW_COLUMNS: &str = "\
Survival CSV columns, in order:
  lambda, d, p_hat, std_err, n_censored, lower_bound, upper_bound,
  griffeath_bound, H_estimate, K_used, seed
Floats are written with 17 significant digits. The first line of every output
is a `#` comment naming the formula being exercised.

Exit codes: 0 success, 1 bound violation, 2 usage error, 3 numerical error,
4 I/O error.";

#[derive(Debug, Parser)]
#[command(name = "contact-mf", version, about = "Contact process survival experiments on Z^d", after_help = ROW_COLUMNS)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct GlobalArgs {
    /// Base seed; each cell uses a seed derived from it and the cell index.
    #[arg(long, global = true, env = "CONTACT_MF_SEED")]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file; without it the results go to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML file: top-level keys for these global options, one table per
    /// subcommand keyed by the long flag names. Flags override the file.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Survival probability from {O} on a (lambda, d) grid, with analytic bounds.
    Survival(SurvivalArgs),
    /// Mean-field ODE f' = -f + lambda f (1 - f).
    Ode(OdeArgs),
    /// Closed-form lower and upper survival bounds.
    Bound(BoundArgs),
    /// Hitting probability H(d) of the origin from e_1.
    Hitting(HittingArgs),
    /// Self-duality check on a torus.
    Duality(TorusArgs),
    /// Path-process coupling and first-moment check on a torus.
    #[command(name = "bcpp-check")]
    BcppCheck(TorusArgs),
    /// Correlation operator, eigenvector residual and second-moment bound.
    Moments(MomentsArgs),
    /// Survival grid plus plot data and optional duality cells.
    Campaign(CampaignArgs),
}

impl Command {
    /// Config-file table for this subcommand.
    pub fn section(&self) -> &'static str {
        match self {
            Command::Survival(_) => "survival",
            Command::Ode(_) => "ode",
            Command::Bound(_) => "bound",
            Command::Hitting(_) => "hitting",
            Command::Duality(_) => "duality",
            Command::BcppCheck(_) => "bcpp-check",
            Command::Moments(_) => "moments",
            Command::Campaign(_) => "campaign",
        }
    }
}

pub const SECTIONS: [&str; 8] = ["survival", "ode", "bound", "hitting", "duality", "bcpp-check", "moments", "campaign"];

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SurvivalArgs {
    /// Infection rates (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// Dimensions (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub d: Option<Vec<usize>>,
    /// Trials per cell [default: 2000].
    #[arg(long)]
    pub trials: Option<u64>,
    /// Time horizon T_max [default: 200].
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Infected-set size counted as survival [default: 500].
    #[arg(long)]
    pub threshold: Option<usize>,
    /// Level K of the lower bound; default picks the best K < 2d.
    #[arg(long)]
    pub level: Option<u64>,
    /// Ball radius of the harmonic solve supplying H(d) [default: 10].
    #[arg(long)]
    pub radius: Option<u32>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CampaignArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub survival: SurvivalArgs,
    /// Also run a duality check per cell on a torus of this side.
    #[arg(long)]
    pub torus_side: Option<u32>,
    /// Time of the duality checks [default: 3].
    #[arg(long)]
    pub time: Option<f64>,
    /// Plot-data file (x = d, y = p_hat, sigma); default `<out>.plot.csv`.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OdeArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// End time [default: 20].
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Step size [default: 1e-3].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Write every n-th step [default: 100].
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct BoundArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Dimension; omit for the d -> infinity limit of the reach bound.
    #[arg(long)]
    pub d: Option<u32>,
    /// Hitting probability H used in the bound [default: 0].
    #[arg(long)]
    pub hitting: Option<f64>,
    /// Size |A| of the starting set [default: 1].
    #[arg(long)]
    pub set_size: Option<u64>,
    /// Level K of the combined bound [default: 1].
    #[arg(long)]
    pub level: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HittingMethod {
    MonteCarlo,
    Harmonic,
    Both,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct HittingArgs {
    #[arg(long, value_delimiter = ',')]
    pub d: Option<Vec<usize>>,
    /// [default: both]
    #[arg(long, value_enum)]
    pub method: Option<HittingMethod>,
    /// Monte Carlo walks [default: 100000].
    #[arg(long)]
    pub trials: Option<u64>,
    /// Monte Carlo step cap [default: 10000].
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Harmonic-solve ball radius [default: 12].
    #[arg(long)]
    pub radius: Option<u32>,
    /// Harmonic-solve tolerance [default: 1e-10].
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TorusArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Even side length, at least 4 [default: 8].
    #[arg(long)]
    pub torus_side: Option<u32>,
    /// Observation time [default: 3].
    #[arg(long)]
    pub time: Option<f64>,
    /// Trials (per side for duality) [default: 10000].
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MomentsArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Truncation radius [default: 10].
    #[arg(long)]
    pub radius: Option<u32>,
    /// Time [default: 1].
    #[arg(long)]
    pub time: Option<f64>,
    /// Largest |A| in the second-moment comparison [default: 3].
    #[arg(long)]
    pub set_size: Option<u64>,
    /// RK4 step; default 0.1 / (2 lambda).
    #[arg(long)]
    pub dt: Option<f64>,
}
