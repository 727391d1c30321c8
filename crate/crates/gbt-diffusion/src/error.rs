//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, validation, and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A comparison value lies outside the range of the active root law.
    #[error("comparison value {value} outside the range of the {law} root law")]
    ComparisonOutOfRange { value: f64, law: &'static str },

    /// An alternative id is out of bounds for the dataset or embedding.
    #[error("alternative id {id} out of bounds (have {num_alternatives} alternatives)")]
    AlternativeOutOfBounds { id: usize, num_alternatives: usize },

    /// A comparison pairs an alternative with itself.
    #[error("comparison pairs alternative {0} with itself")]
    SelfComparison(usize),

    /// Two objects that must agree on a dimension do not.
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A matrix expected to be a Laplacian fails the predicate.
    #[error("matrix is not a Laplacian: {0}")]
    NotLaplacian(String),

    /// A scalar parameter violates its domain (e.g. sigma <= 0).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The Newton solver hit its iteration cap before reaching tolerance.
    #[error("solver did not converge: gradient norm {grad_norm:.3e} after {iterations} iterations")]
    NotConverged { grad_norm: f64, iterations: usize },

    /// A matrix factorization failed (singular or not positive definite).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed input file (CSV or JSON), with position diagnostics.
    #[error("parse error in {path}: {detail}")]
    Parse { path: String, detail: String },

    /// A file could not be read or written (keeps the path for context).
    #[error("cannot access {path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
