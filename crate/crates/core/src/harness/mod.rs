//! Benchmark harness behind the command-line tool: configuration files,
//! single runs with snapshots, `(N, Δt)` sweeps and CSV output.

pub mod config;
pub mod csv;
mod run;
mod sweep;

use thiserror::Error;

use crate::diagnostics::DiagnosticsError;
use crate::problems::ProblemError;
use crate::spectral::TransformError;
use crate::stepper::StepError;

pub use config::{RunConfig, SweepConfig};
pub use run::{
    emit_exact, run_single, write_run, ErrorRow, RunArtifacts, RunFailure, Simulation, Snapshot,
};
pub use sweep::{orders_from_sweep, run_cell, run_sweep};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config key '{key}': {message}")]
    Config { key: String, message: String },
    #[error("problem '{0}' has no exact solution")]
    NoExact(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Usage and configuration problems, as opposed to I/O failures.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Self::Io(_))
    }
}
