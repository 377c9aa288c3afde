use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = NtsError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum NtsError {
    /// An attribute name that does not exist in the table it was looked up in.
    #[error("schema error: {0}")]
    Schema(String),

    /// A hyperparameter or count outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A caller violated an operation's precondition.
    #[error("contract error: {0}")]
    Contract(String),

    /// A structurally valid input that fails a domain rule.
    #[error("validation error: {0}")]
    Validation(String),

    /// Missing embedding or table vector.
    #[error("lookup error: {0}")]
    Lookup(String),

    /// A required input (such as an embedding file) was not supplied.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}:{line}: {message}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl NtsError {
    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        NtsError::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        NtsError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            NtsError::Io { .. } => 3,
            NtsError::Config(_) | NtsError::Lookup(_) => 4,
            _ => 2,
        }
    }
}
