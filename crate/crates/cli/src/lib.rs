//! Config-driven front end: `simulate`, `wigner` and `validate`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 integration error,
//! 1 for I/O failures while writing results.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Cli};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn field(field: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Config(format!("field `{field}`: {reason}"))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
