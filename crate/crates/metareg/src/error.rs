//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by model validation, numerical routines and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid input data or model specification.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A numerical procedure failed (non-normalizable posterior, singular
    /// matrix, divergent integral).
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// The requested quantity is undefined for this model (e.g. a marginal
    /// likelihood under an improper prior).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed input file contents, with a row/column diagnostic.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
