use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed JSON: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: missing required field \"code\" (or \"original_string\")")]
    MissingCode { path: PathBuf, line: usize },

    #[error("duplicate document id {0:?}")]
    DuplicateId(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("embedding vocabulary is empty (every token is below min_count)")]
    EmptyVocabulary,

    #[error("zero-norm vector has no cosine")]
    ZeroNorm,

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("no embeddable documents in {0} corpus")]
    NoEmbeddableDocuments(&'static str),

    #[error("cannot normalize: maximum value {0} is not positive")]
    NonPositiveMaximum(f64),

    #[error("no textual signal: every clone count is zero")]
    NoTextualSignal,

    #[error("key sets differ: {0}")]
    KeyMismatch(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("inconsistent rows: {0}")]
    InconsistentRows(String),

    #[error("unknown task {0:?} (expected \"summarization\" or \"search\")")]
    UnknownTask(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
