use std::io;
use std::path::{Path, PathBuf};

use cotrace_core::ingest::IngestError;
use cotrace_core::synth::ConfigError;

/// Everything the pipeline can fail with, mapped onto process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("FILE_NOT_FOUND: {}", path.display())]
    FileNotFound { path: PathBuf },
    #[error("IO_ERROR: {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("INVALID_CONFIG: {0}")]
    Config(String),
    #[error("{source} (in {})", path.display())]
    Ingest { path: PathBuf, source: IngestError },
    #[error("{0}")]
    Validation(IngestError),
    #[error("{0}")]
    Scenario(ConfigError),
    #[error("MALFORMED_ARTIFACT: {}: {message}", path.display())]
    Artifact { path: PathBuf, message: String },
}

impl Error {
    /// 1 for problems with the data, 2 for usage and IO problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Ingest { .. } | Error::Validation(_) | Error::Artifact { .. } => 1,
            Error::FileNotFound { .. }
            | Error::Io { .. }
            | Error::Config(_)
            | Error::Scenario(_) => 2,
        }
    }

    pub(crate) fn io(path: &Path, source: io::Error) -> Error {
        if source.kind() == io::ErrorKind::NotFound {
            Error::FileNotFound {
                path: path.to_path_buf(),
            }
        } else {
            Error::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    }
}

impl From<ConfigError> for Error {
    fn from(e: ConfigError) -> Error {
        Error::Scenario(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
