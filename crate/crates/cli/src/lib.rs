//! Library backing the `lindblad` binary: strict JSON configs, the five
//! subcommand runners, and CSV/manifest output.

pub mod commands;
pub mod config;
pub mod output;

use lindblad_core::CoreError;
use thiserror::Error;

/// Exit codes: 0 success, 2 config error, 3 memory refusal, 4 numerical
/// failure, 5 trajectory step-size violation, 1 anything else.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(err) => match err.root() {
                CoreError::OutOfMemoryBudget { .. } => 3,
                CoreError::NumericalFailure { .. } | CoreError::DegenerateState { .. } => 4,
                CoreError::StepSizeTooLarge { .. } => 5,
                _ => 2,
            },
        }
    }
}
