use std::path::PathBuf;

use thiserror::Error;

use crate::config::FieldError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:{}", render(.0))]
    Config(Vec<FieldError>),
    #[error("numerical precondition failed ({context}): {source}")]
    Numeric {
        context: String,
        #[source]
        source: idjc_core::Error,
    },
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("self-check failed:{}", render(.0))]
    SelfCheck(Vec<String>),
}

fn render<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|item| format!("\n  {item}")).collect()
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SelfCheck(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn numeric(context: impl Into<String>, source: idjc_core::Error) -> Self {
        CliError::Numeric { context: context.into(), source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
