use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode image {path}: {message}")]
    Image { path: PathBuf, message: String },

    #[error("unsupported image format in {path}: {message}")]
    UnsupportedFormat { path: PathBuf, message: String },

    #[error("image {0} has zero width or height")]
    EmptyImage(PathBuf),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("anchor mismatch: {0}")]
    AnchorMismatch(String),

    #[error("malformed .flo data: {0}")]
    Flo(String),

    #[error(
        "insufficient motion: {qualified} pixels passed the magnitude and direction gates, \
         {required} required"
    )]
    InsufficientMotion { qualified: usize, required: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t} outside the valid domain [{lo}, {hi}]")]
    OutOfDomain { t: f64, lo: f64, hi: f64 },

    #[error("quad {index}: {source}")]
    Quad {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("json error on {path}: {message}")]
    Json { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Attach a quad index to an error raised while processing a sequence.
    pub fn in_quad(self, index: usize) -> Self {
        match self {
            e @ Error::Quad { .. } => e,
            e => Error::Quad {
                index,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, skipping any quad-index wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Quad { source, .. } => source.root(),
            e => e,
        }
    }
}

pub(crate) fn check_dims(expected: (usize, usize), actual: (usize, usize)) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}
