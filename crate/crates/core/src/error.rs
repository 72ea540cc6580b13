use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the decomposition, filtering, and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid knots: {0}")]
    InvalidKnots(String),

    #[error("t = {t} is outside the spline domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("cannot extend control points: {0}")]
    Extension(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
