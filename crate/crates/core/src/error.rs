use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the smoothing library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("decode error at byte {offset}: {message}")]
    Decode { offset: usize, message: String },

    #[error("unsupported image format for {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("expected {expected} channel(s), got {actual}")]
    Channels { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    Dimensions(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-positive pivot {value:e} at row {row}; system is not positive definite")]
    Pivot { row: usize, value: f64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    Length { expected: usize, actual: usize },

    #[error("singular matrix at column {0}")]
    Singular(usize),

    #[error("conjugate gradient did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("sparse input has no defined samples")]
    EmptyMask,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn decode(offset: usize, message: impl Into<String>) -> Self {
        Error::Decode {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
