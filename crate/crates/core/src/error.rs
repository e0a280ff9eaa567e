//! Error taxonomy shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Unsupported or inconsistent configuration (bad dimension, bad
    /// profile parameters, dimension mismatch, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller violated an operation contract (field length mismatch,
    /// node outside the chart, stencil leaving the parameter box).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Numerical failure or a failed internal cross-check.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A mathematical precondition does not hold for the requested check.
    #[error("precondition not met: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
