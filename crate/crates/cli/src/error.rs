use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Degenerate(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io { .. } => EXIT_USAGE,
            CliError::Degenerate(_) => EXIT_DEGENERATE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

impl From<featcov::Error> for CliError {
    fn from(e: featcov::Error) -> Self {
        use featcov::Error as E;
        match e {
            E::InvalidArgument(_) => CliError::Usage(e.to_string()),
            E::InsufficientPoints(_) | E::InsufficientCorrespondences(_) => {
                CliError::Degenerate(e.to_string())
            }
            E::DegenerateConfiguration(_) | E::PointAtInfinity(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
