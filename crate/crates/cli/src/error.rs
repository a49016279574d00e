use std::io;
use std::path::PathBuf;

use thiserror::Error;
use treescore_core::Error as CoreError;

/// Process exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const DATA: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}:{line}:{column}: {message}", path.display())]
    TreeSyntax {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    /// Every violation found in a tree file, one per line when displayed.
    #[error("{}", join_lines(.0))]
    InvalidTree(Vec<CoreError>),

    #[error("{}: row {row}: unknown label {label:?}", path.display())]
    UnknownLabel { path: PathBuf, row: u64, label: String },

    #[error("{}: row {row}: {message}", path.display())]
    BadRow { path: PathBuf, row: u64, message: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{0}")]
    Evaluation(#[from] CoreError),
}

fn join_lines(errors: &[CoreError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::TreeSyntax { .. } | CliError::InvalidTree(_) => exit::VALIDATION,
            CliError::UnknownLabel { .. } | CliError::BadRow { .. } | CliError::Io { .. } | CliError::Evaluation(_) => {
                exit::DATA
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
