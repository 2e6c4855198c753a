//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("singular matrix")]
    Singular,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("partitions have different totals")]
    TotalMismatch,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("sampling failed after {attempts} attempts")]
    SampleFailure { attempts: usize },
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),
}

pub type Result<T> = std::result::Result<T, Error>;
