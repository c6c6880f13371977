use thiserror::Error;

/// Errors shared across the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a Hadamard matrix: {0}")]
    NotHadamard(String),
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("non-orthogonal inputs: pair ({0}, {1}) has product norm {2:.3e}")]
    NonOrthogonal(usize, usize, f64),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("insufficient table: {0}")]
    TableInsufficient(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
