//! Benchmark driver: resolves a run configuration, calls the solvers, and
//! writes `report.json`, `residuals.csv` and optional snapshots.

pub mod config;
pub mod csvio;
pub mod run;

use hyperpint::PintError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Solver(#[from] PintError),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit code: 2 for bad input, 5 for an inadmissible state, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            BenchError::Usage(_) | BenchError::Config { .. } | BenchError::Parse(_) => 2,
            BenchError::Solver(e) if e.is_inadmissible() => 5,
            BenchError::Solver(PintError::InvalidParameter(_) | PintError::DimensionMismatch { .. }) => 2,
            _ => 1,
        }
    }
}
