//! Experiment orchestration: configs, runs, rate comparisons, envelope
//! certification of traces, the acceptance battery, and the command line.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod suite;

use thiserror::Error;

use crate::envelope::EnvelopeError;
use crate::problems::ProblemError;
use crate::rates::RateError;
use crate::solvers::SolverError;

pub use cli::cli_main;
pub use config::{ExperimentConfig, Prediction, SolverId, Transform, OUTPUT_ROOT_ENV};
pub use experiment::{
    certify_trace, compare_bounds, predict, run_experiment, ComparisonReport, EnvelopeOutcome,
    ExperimentReport, LiftedGrowth, PredictionOutcome,
};
pub use suite::{run_suite, CriterionOutcome};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Rounds to 12 significant digits and prints the shortest representation,
/// so `800.0000000000001` prints as `800`.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    rounded.to_string()
}
