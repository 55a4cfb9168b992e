use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite logit at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },

    #[error("label {label} at row {row} is out of range for {classes} classes")]
    LabelOutOfRange {
        row: usize,
        label: i64,
        classes: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dataset has no labels")]
    MissingLabels,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {kind}")]
    Format { path: PathBuf, kind: FormatError },

    #[error("serialization: {0}")]
    Serialize(String),
}

/// Reasons an array file is rejected by the reader.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic bytes, not an npy file")]
    BadMagic,
    #[error("unsupported npy version {0}.{1}")]
    UnsupportedVersion(u8, u8),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported dtype {0:?}")]
    UnsupportedDtype(String),
    #[error("unsupported layout: fortran_order=True")]
    UnsupportedLayout,
    #[error("unsupported shape {0:?}, expected 1-D or 2-D")]
    UnsupportedShape(Vec<usize>),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("trailing bytes after payload: {0}")]
    TrailingBytes(usize),
    #[error("csv: {0}")]
    Csv(String),
    #[error("unknown file extension, expected .npy or .csv")]
    UnknownExtension,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, kind: FormatError) -> Self {
        Error::Format {
            path: path.into(),
            kind,
        }
    }
}
