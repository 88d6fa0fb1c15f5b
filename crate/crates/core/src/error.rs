use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value at depth {depth}")]
    NonFinite { depth: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last iterate {last}, residual {residual:e})")]
    NoConvergence { iterations: usize, last: f64, residual: f64 },

    #[error("no boundary at this threshold")]
    EmptyBoundary,

    #[error("insufficient scales: need at least {required}, got {actual}")]
    InsufficientScales { required: usize, actual: usize },

    #[error("all thresholds degenerate: {}", .0.join("; "))]
    AllThresholdsDegenerate(Vec<String>),

    #[error("region error: {0}")]
    Region(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
