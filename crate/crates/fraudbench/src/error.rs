use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: header mismatch: expected [{expected}], found [{found}]")]
    Header {
        path: PathBuf,
        expected: String,
        found: String,
    },

    /// `row` counts data records from 1 (the header is not a row); `line` is the file line.
    #[error("{path}: row {row} (line {line}), column `{column}`: {message}")]
    Cell {
        path: PathBuf,
        row: usize,
        line: u64,
        column: String,
        message: String,
    },

    #[error("{path}: malformed CSV: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: corrupt model file: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Core(#[from] fraudbench_core::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}
