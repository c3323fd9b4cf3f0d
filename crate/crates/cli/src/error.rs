use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("output directory {} is locked by another run (remove {} if stale)", .0.display(), .0.join(".lock").display())]
    Locked(PathBuf),
    #[error("{}: {detail}", path.display())]
    Parse { path: PathBuf, detail: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Transport(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Locked(_) => 1,
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Transport(_) => 4,
        }
    }

    pub fn parse(path: &Path, detail: impl ToString) -> Self {
        CliError::Parse {
            path: path.to_path_buf(),
            detail: detail.to_string(),
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
