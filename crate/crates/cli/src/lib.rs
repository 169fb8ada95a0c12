//! `fselect` command-line front end: CSV ingestion, ranking, cross-validation
//! and benchmarking, with JSON, CSV or text reports.
//!
//! JSON is the default and is byte-stable for a fixed input, settings and
//! seed regardless of the worker count. Timing fields of `bench` reports are
//! the only nondeterministic values.

pub mod args;
mod commands;
mod render;
pub mod report;

pub use commands::{bench, cv, rank, run};

/// Process exit status for success.
pub const EXIT_OK: u8 = 0;
/// I/O or parse failure.
pub const EXIT_IO: u8 = 2;
/// Invalid configuration.
pub const EXIT_CONFIG: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
        }
    }
}

impl From<fselect_core::Error> for CliError {
    fn from(e: fselect_core::Error) -> Self {
        if e.is_config() {
            CliError::Config(e.to_string())
        } else {
            CliError::Io(e.to_string())
        }
    }
}
