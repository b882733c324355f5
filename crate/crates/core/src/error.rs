use std::path::PathBuf;

/// Errors produced by the clustering pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: no data rows")]
    NoDataRows { path: PathBuf },

    #[error("empty level set: no sample point has density >= {level}")]
    EmptyLevelSet { level: f64 },

    #[error("eigensolver failed on a {size}x{size} matrix: {message}")]
    Eigensolver { size: usize, message: String },

    #[error("query point is outside the graph support (no retained point within h)")]
    OutsideSupport,

    #[error("k = {k} exceeds distinct points ({distinct})")]
    TooManyClusters { k: usize, distinct: usize },

    #[error("degenerate embedding: feature matrix is rank deficient")]
    DegenerateEmbedding,

    #[error("d_min undefined: only one connected component")]
    SingleComponent,

    #[error("matrix of size {size} exceeds the reference limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
