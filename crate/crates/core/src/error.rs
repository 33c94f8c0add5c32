use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::DegenerateError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Degenerate(#[from] DegenerateError),

    #[error("invalid cell size {0}: must be positive and finite")]
    InvalidCellSize(f64),

    #[error("invalid maximal dimension {d_max} for ambient dimension {ambient} (need 1 <= d_max <= ambient - 1)")]
    InvalidDims { d_max: usize, ambient: usize },

    #[error("inconsistent override for d = {d}: {reason}")]
    InconsistentOverride { d: usize, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid mixture weights: {0}")]
    Weight(String),

    #[error("layer of dimension {0} has no co-detected tuples")]
    EmptyLayer(usize),

    #[error("ground truth has no labels")]
    MissingLabels,

    #[error("ground truth has no manifold specs")]
    MissingSpecs,

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("input of size {n} exceeds the brute-force guard {guard}")]
    TooLarge { n: usize, guard: usize },

    #[error("insufficient data for rate fit: {0}")]
    InsufficientData(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
