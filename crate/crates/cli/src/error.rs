use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A data file does not match its schema.
    #[error("{}:{line}:{column}: {message}", path.display())]
    Schema {
        path: PathBuf,
        line: u64,
        column: u64,
        message: String,
    },

    #[error(transparent)]
    Simulation(kerrwalk::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// 2 for configuration problems, 1 for everything that fails at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

impl From<kerrwalk::Error> for CliError {
    fn from(e: kerrwalk::Error) -> Self {
        match e {
            kerrwalk::Error::InvalidParameter { field, reason } => CliError::Config {
                field: field.to_string(),
                reason,
            },
            e @ kerrwalk::Error::LatticeOverflow { .. } => CliError::config("steps", e.to_string()),
            e => CliError::Simulation(e),
        }
    }
}
