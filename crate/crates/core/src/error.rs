use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller violated an operation precondition.
    #[error("usage error: {0}")]
    Usage(String),
    /// Inputs are outside the domain where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative or time-stepping scheme failed.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A pathwise or algebraic identity did not hold.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
