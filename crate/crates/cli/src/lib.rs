//! Library side of the `contact-mf` binary: argument types, config merging,
//! result rows and the subcommand drivers.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

pub use commands::{run, ResultRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] contact_core::Error),
    #[error("bound violation: {0}")]
    Violation(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> u8 {
        use contact_core::Error as E;
        match self {
            CliError::Violation(_) | CliError::Core(E::InvariantViolation(_)) => 1,
            CliError::Usage(_) | CliError::Core(E::Usage(_) | E::Domain(_)) => 2,
            CliError::Core(E::Numerical(_)) => 3,
            CliError::Io { .. } => 4,
        }
    }
}
