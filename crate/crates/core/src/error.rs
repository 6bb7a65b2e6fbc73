use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid probe state: {0}")]
    InvalidState(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("amplitudes are not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("largest eigenvalue {max} exceeds the ceiling {ceiling}")]
    EigenvalueCeiling { max: u64, ceiling: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
