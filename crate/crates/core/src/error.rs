use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero cardinality")]
    ZeroCardinality,

    #[error("k = {k} exceeds cardinality {cardinality}")]
    KTooLarge { k: usize, cardinality: usize },

    #[error("k must be at least 1")]
    ZeroK,

    #[error("{0}")]
    Input(String),

    #[error("{path}: {detail}")]
    Parse { path: PathBuf, detail: String },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("unknown distance function {0:?}")]
    UnknownDistance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
