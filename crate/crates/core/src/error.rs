use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("outcome labels do not match")]
    LabelMismatch,

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("support of the first state is not contained in the support of the second")]
    SupportViolation,

    #[error("block label 2j={two_j} is invalid for l={l}")]
    InvalidBlock { l: u32, two_j: u32 },

    #[error("block counts do not match: l={0} vs l={1}")]
    BlockLengthMismatch(u32, u32),

    #[error("multiplicity overflows 128-bit arithmetic at l={0}")]
    Overflow(u32),

    #[error("outcome index {0} is outside the alphabet")]
    UnknownOutcome(usize),

    #[error("change is undetectable: drift {0} is not positive")]
    Undetectable(f64),

    #[error("states are identical: there is no change to detect")]
    NoChange,

    #[error(
        "variational solver did not converge: value {value}, gradient norm {grad_norm:e} after {iterations} iterations"
    )]
    NotConverged { value: f64, grad_norm: f64, iterations: usize },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
