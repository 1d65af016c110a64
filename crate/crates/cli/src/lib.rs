//! Experiment harness for graph-cut estimation of continuum Cheeger
//! quantities: configuration, experiment runners and report files.

pub mod config;
pub mod experiments;
pub mod report;

use thiserror::Error;

/// Harness errors, mapped to process exit codes by the CLI:
/// 0 success, 2 config error, 3 budget error, 4 check-mode failure,
/// 1 anything else (including infeasible estimates).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {msg}")]
    Config { path: String, line: usize, msg: String },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("check failed: {0}")]
    Check(String),

    #[error("estimate produced no feasible candidate: {0}")]
    Infeasible(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] cheeger_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Budget(_) => 3,
            CliError::Check(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
