use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = FixError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FixError {
    /// A caller passed an argument outside an operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Incompatible or invalid configuration (scorer/extractor/modality).
    #[error("configuration error: {0}")]
    Config(String),

    /// A parameter of an extractor or scorer specification is invalid.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("missing embedding for `{0}`")]
    MissingEmbedding(String),

    #[error("degenerate circumplex axes: {0}")]
    DegenerateAxes(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FixError {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        FixError::Argument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        FixError::Config(msg.into())
    }

    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        FixError::Parameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FixError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by how the tool was invoked rather than by the
    /// content of the data it was pointed at.
    pub fn is_usage(&self) -> bool {
        match self {
            FixError::Config(_) | FixError::Parameter { .. } => true,
            FixError::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            _ => false,
        }
    }
}
