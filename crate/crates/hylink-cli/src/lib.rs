//! Orchestration around `hylink-core`: scenario and calibration files, sweep
//! scheduling over a worker pool, CSV rendering, and the summary report.

pub mod config;
pub mod csvout;
pub mod hash;
pub mod report;
pub mod runner;

pub use hylink_core as core;

use std::fmt;

/// CLI-facing error split by exit code: configuration problems exit with 2,
/// runtime failures with 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn config(e: impl fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn runtime(e: impl fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Runtime(m) => write!(f, "runtime error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
