//! File formats, reports and subcommand drivers around `lcc-core`.
//!
//! Every subcommand takes a [`RunConfig`], writes a JSON report (plus CSV
//! tables where there is one row per round, tuple or iteration) into the
//! output directory and returns the lines to print. Reports carry the config
//! they were produced from, so a run can be repeated from its report alone.

pub mod commands;
pub mod config;
pub mod report;
pub mod shares;

use std::path::PathBuf;

pub use commands::{run, Outcome};
pub use config::{Command, RunConfig};
pub use shares::ShareFile;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Both region inequalities fail; carries the evaluated inequalities.
    #[error("{0}")]
    Infeasible(String),
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("format: {0}")]
    Format(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    /// 2 for infeasible parameters, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }
}
