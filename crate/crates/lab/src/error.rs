use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Malformed configuration text; `line` is 1-based when known.
    #[error("{}", match line { Some(l) => format!("config line {l}: {message}"), None => format!("config: {message}") })]
    Syntax { line: Option<usize>, message: String },

    /// A well-formed value that fails validation; `path` names the field.
    #[error("config field `{path}`: {message}")]
    Field { path: String, message: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] aoi_core::Error),
}

impl LabError {
    pub(crate) fn field(path: impl Into<String>, message: impl std::fmt::Display) -> Self {
        LabError::Field { path: path.into(), message: message.to_string() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
