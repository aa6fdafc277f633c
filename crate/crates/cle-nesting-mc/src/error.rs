//! Error type for the simulation layer.

use thiserror::Error;

/// Everything that can go wrong while configuring or running a simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// The run configuration is inconsistent (bad window, missing weight
    /// law, tilt at or beyond the critical value, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A hard resource cap would be exceeded (convolution count, grid
    /// refinement floor).
    #[error("resource limit: {0}")]
    Resource(String),

    /// An error bubbled up from the analytic layer.
    #[error(transparent)]
    Core(#[from] cle_nesting::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
