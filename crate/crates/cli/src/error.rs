use std::path::PathBuf;

use dsfusion::FusionError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Fusion(#[from] FusionError),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing artifact {path}: run `train` first or pass --artifacts")]
    MissingArtifact { path: PathBuf },

    #[error("fixture mismatch: {0}")]
    FixtureMismatch(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for bad input or a failed check, 2 for anything
    /// that points at a defect or an environment failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Fusion(e) if !e.is_validation() => 2,
            CliError::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
