//! Experiment runner: configuration, sweeps, CSV records and aggregation.

pub mod config;
pub mod experiment;
pub mod record;
pub mod render;

use fsr_core::FsrError;
use thiserror::Error;

pub use config::{ExperimentConfig, RawConfig, SweepAxis, Targets};
pub use experiment::{log_slope, run_experiment, run_sweep, run_single, Outcome, RunOutput};
pub use record::{SweepRecord, SCHEMA_VERSION};
pub use render::{aggregate, AggregateRow};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] FsrError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 3 when the
    /// simulator's qubit budget is exceeded, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(FsrError::Capacity { .. }) => 3,
            CliError::Core(FsrError::Parse(_)) => 2,
            _ => 1,
        }
    }
}
