use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("duplicate token {token:?} on lines {first_line} and {second_line}")]
    DuplicateToken {
        token: String,
        first_line: usize,
        second_line: usize,
    },

    #[error("empty token on line {line}")]
    EmptyToken { line: usize },

    #[error("invalid token on line {line}: {reason}")]
    InvalidToken { line: usize, reason: String },

    #[error("missing required special tokens: {}", .0.join(", "))]
    MissingSpecials(Vec<String>),

    #[error("invalid tensor container: {0}")]
    Container(String),

    #[error("unsupported dtype {0:?} (only F32 is supported)")]
    UnsupportedDtype(String),

    #[error("payload length mismatch: header declares {expected} bytes, found {actual}")]
    PayloadLength { expected: u64, actual: u64 },

    #[error("non-finite embedding value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("vocabulary/embedding size mismatch: {vocab} vs {rows}")]
    ShapeMismatch { vocab: usize, rows: usize },

    #[error("embedding dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("invalid metadata: {0}")]
    Metadata(String),

    #[error("{}: no valid lexicon entries ({skipped} lines skipped)", path.display())]
    EmptyLexicon { path: PathBuf, skipped: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        if source.kind() == std::io::ErrorKind::NotFound {
            return Error::MissingFile(path.into());
        }
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
