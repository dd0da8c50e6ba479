use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] vfi_core::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 0 success, 1 i/o, 2 usage or validation, 3 degenerate input.
    pub fn exit_code(&self) -> u8 {
        use vfi_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e.root() {
                E::Io { .. } | E::Image { .. } | E::UnsupportedFormat { .. } | E::EmptyImage(_) => 1,
                E::Flo(_) | E::Json { .. } => 1,
                E::InsufficientMotion { .. } => 3,
                _ => 2,
            },
        }
    }
}
