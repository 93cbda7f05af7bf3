use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] multirobust_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("{path}: bad IDX magic number {found:#010x}, expected {expected:#010x}")]
    BadMagic {
        path: PathBuf,
        expected: u32,
        found: u32,
    },

    #[error("{path}: truncated file, needed {needed} bytes, found {found}")]
    TruncatedFile {
        path: PathBuf,
        needed: usize,
        found: usize,
    },

    #[error("dataset is empty: {0}")]
    EmptyDataset(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 usage/config, 2 verification failure, 3 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Verification(_) => 2,
            HarnessError::Io { .. }
            | HarnessError::Parse { .. }
            | HarnessError::BadMagic { .. }
            | HarnessError::TruncatedFile { .. } => 3,
            _ => 1,
        }
    }
}
