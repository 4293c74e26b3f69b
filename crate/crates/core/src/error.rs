use thiserror::Error;

/// Errors produced by parsers, pipelines and solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    Budget {
        what: &'static str,
        needed: String,
        cap: u64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("pipeline `{pipeline}` does not support `{operation}`")]
    Unsupported {
        pipeline: &'static str,
        operation: &'static str,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
