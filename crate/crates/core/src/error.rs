use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidGroupSpec(String),

    #[error("table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },

    #[error("group order {order} exceeds the configured cap {cap}")]
    GroupTooLarge { order: usize, cap: usize },

    #[error("genus must be at least 1")]
    ZeroGenus,

    #[error("unsupported search depth {0} (expected 1 or 2)")]
    SearchDepth(usize),

    #[error("|G|^(2n) = {states} states exceeds the state cap {cap}; lower n or use a smaller group")]
    StateCapExceeded { states: u128, cap: u64 },

    #[error("tuple has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degree {degree} is beyond the computed range (top degree {top})")]
    DegreeOverflow { degree: usize, top: usize },

    #[error("composite of chain maps is nonzero at row {row}, column {col}")]
    NonzeroComposite { row: usize, col: usize },

    #[error("matrix shapes do not compose: {0}")]
    Shape(String),

    #[error("group is not abelian")]
    NotAbelian,

    #[error("cache: {0}")]
    Cache(String),

    #[error("cache hash mismatch on {field}")]
    CacheMismatch { field: &'static str },

    #[error("config: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {cause}")]
    Stage { stage: &'static str, cause: String },

    #[error("module: {0}")]
    Module(String),

    #[error("matrix parse error: {0}")]
    MatrixParse(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
