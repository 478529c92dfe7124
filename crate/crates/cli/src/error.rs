use std::path::PathBuf;

use thiserror::Error;

/// Failures of a CLI run, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flag value or unusable combination of flags.
    #[error("invalid {field}: {reason}")]
    Config { field: String, reason: String },

    /// An input file that cannot be read or parsed.
    #[error("cannot use {}: {reason}", path.display())]
    Input { path: PathBuf, reason: String },

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A library routine failed.
    #[error("{context}: {source}")]
    Library {
        context: String,
        #[source]
        source: shallowscope::Error,
    },

    #[error("ragged table: row {row} has {found} cells, header has {expected}")]
    RaggedTable {
        row: usize,
        expected: usize,
        found: usize,
    },
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn input(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        CliError::Input {
            path: path.into(),
            reason: reason.to_string(),
        }
    }

    /// 2 for configuration and input problems (including inputs the library
    /// rejects on validation), 3 for downstream failures.
    pub fn exit_code(&self) -> i32 {
        use shallowscope::Error as E;
        match self {
            CliError::Config { .. } | CliError::Input { .. } => 2,
            CliError::Library { source, .. } => match source {
                E::InvalidArgument(_)
                | E::InvalidSubset(_)
                | E::DimensionMismatch { .. }
                | E::TooManyQubits { .. }
                | E::Unsupported(_)
                | E::Parse(_)
                | E::Json(_) => 2,
                _ => 3,
            },
            CliError::Output { .. } | CliError::RaggedTable { .. } => 3,
        }
    }
}

/// Attaches a context string to a library error.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> Context<T> for shallowscope::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Library {
            context: what(),
            source,
        })
    }
}
