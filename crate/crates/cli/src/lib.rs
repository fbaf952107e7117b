//! Batch front end for the lattice Yang–Mills calculus: invariant
//! verification, action and residual evaluation, and relaxation runs.
//!
//! Every command produces a [`Report`] whose JSON form depends only on the
//! configuration, and maps its outcome to an exit code:
//! 0 pass, 1 check failure, 2 configuration error, 3 solver abort.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;

pub use commands::{run_command, Command, Outcome};
pub use config::{ConnectionSource, GaugeSource, RunConfig};
pub use report::{Check, Expectation, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver aborted: {0}")]
    SolverAbort(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] ymlattice_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::SolverAbort(_) => 3,
            // Internal failures count as failed checks.
            CliError::Io(_) | CliError::Core(_) => 1,
        }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
