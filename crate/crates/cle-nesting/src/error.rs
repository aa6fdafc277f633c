//! Error type shared by the numerical routines.

use thiserror::Error;

/// Failure modes of the library routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation
    /// (a tilt at or past the critical value, kappa outside (8/3, 8), a
    /// nonpositive evaluation point, an empty tilt domain).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative scheme exhausted its budget before reaching the
    /// requested tolerance (series cap, bracketing cap, halving cap).
    #[error("convergence error: {0}")]
    Convergence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
