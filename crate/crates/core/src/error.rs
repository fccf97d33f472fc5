use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments to a numerical routine (dimension mismatch, nonpositive step, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A configuration violates a structural requirement (topology shape, weight matrix, ranges).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The centralized oracle could not restore feasibility.
    #[error("feasibility restoration failed: {0}")]
    Infeasible(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag, used in the CLI's JSON error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Config(_) => "config",
            Error::Infeasible(_) => "infeasible",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected != got {
        return Err(Error::Input(format!(
            "{what}: expected dimension {expected}, got {got}"
        )));
    }
    Ok(())
}
