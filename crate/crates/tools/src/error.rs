use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToolError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] srir_core::Error),
    #[error("{0}")]
    Runtime(String),
    /// Some items of a batch failed; the rest were written.
    #[error("{} of {total} items failed:\n{}", .failures.len(), .failures.iter().map(|(id, e)| format!("  {id}: {e}")).collect::<Vec<_>>().join("\n"))]
    Partial { total: usize, failures: Vec<(String, ToolError)> },
}

pub type Result<T> = std::result::Result<T, ToolError>;

impl ToolError {
    pub fn config(msg: impl Into<String>) -> Self {
        ToolError::Config(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        ToolError::Io { path: path.to_path_buf(), source }
    }

    pub fn file(path: &Path, message: impl ToString) -> Self {
        ToolError::File { path: path.to_path_buf(), message: message.to_string() }
    }

    pub fn is_configuration(&self) -> bool {
        match self {
            ToolError::Config(_) => true,
            ToolError::Core(e) => e.is_configuration(),
            ToolError::Partial { failures, .. } => failures.iter().any(|(_, e)| e.is_configuration()),
            _ => false,
        }
    }

    /// 2 for configuration errors, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        if self.is_configuration() {
            2
        } else {
            1
        }
    }
}
