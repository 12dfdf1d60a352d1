//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or statistical parameter is outside its valid domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A series evaluation hit its term cap before meeting the tolerance.
    #[error("series did not converge: {0}")]
    NonConvergence(String),

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// A CDF evaluation landed outside [0, 1] beyond tolerance, which
    /// signals an implementation or transcription fault.
    #[error("cdf value {0} outside [0, 1]")]
    CdfOutOfRange(f64),

    /// A root solve was asked for on a bracket that contains no root.
    #[error("no root in bracket: {0}")]
    NoRoot(String),

    /// Configuration file or CLI argument problem.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
