use std::path::PathBuf;
use thiserror::Error;

/// Errors raised anywhere in the derivative pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("singular linear system (pivot {pivot:e} at column {column})")]
    SingularSystem { column: usize, pivot: f64 },

    #[error("degenerate phase pivot: |x[{index}]| = {magnitude:e}")]
    DegeneratePivot { index: usize, magnitude: f64 },

    #[error("repeated singular value at index {index}: gap {gap:e} <= {threshold:e}")]
    RepeatedSingularValue {
        index: usize,
        gap: f64,
        threshold: f64,
    },

    #[error("singular value {index} out of range (have {available})")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("stale triplet: governing residual {residual:e} exceeds {tolerance:e}")]
    StaleTriplet { residual: f64, tolerance: f64 },

    #[error("singular value {sigma:e} below rank tolerance {tolerance:e}")]
    NearZeroSigma { sigma: f64, tolerance: f64 },

    #[error("rank deficiency: eigenvalue {index} is {value:e}, below {threshold:e}")]
    Rank {
        index: usize,
        value: f64,
        threshold: f64,
    },

    #[error("finite-difference probe ({row}, {col}) failed: {source}")]
    Probe {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by a numerically degenerate problem
    /// (repeated or vanishing singular values, singular systems).
    pub fn is_degeneracy(&self) -> bool {
        match self {
            Error::SingularSystem { .. }
            | Error::DegeneratePivot { .. }
            | Error::RepeatedSingularValue { .. }
            | Error::Convergence { .. }
            | Error::StaleTriplet { .. }
            | Error::NearZeroSigma { .. }
            | Error::Rank { .. } => true,
            Error::Probe { source, .. } => source.is_degeneracy(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
