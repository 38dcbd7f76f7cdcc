//! Benchmark harness: single runs, parameter sweeps and the CSV row format.

pub mod row;
pub mod run;
pub mod sweep;

use std::path::PathBuf;

use staeb_core::io::IoError;
use thiserror::Error;

pub use row::{read_rows, RowWriter, RunRow, SCHEMA_LINE};
pub use run::{run_instance, solve, Outcome, RunOptions, Source};
pub use sweep::{desk_config, run_sweep, Axis, CellSummary, SweepSpec, DESK_SIDE};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Input(#[from] IoError),
    #[error("cannot access {path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
    #[error("matching rejected: {0}")]
    Rejected(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl BenchError {
    /// Process exit code: 1 usage, 2 input, 3 invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 1,
            BenchError::Input(_) | BenchError::File { .. } | BenchError::Csv(_) | BenchError::Rejected(_) => 2,
            BenchError::Invariant(_) => 3,
        }
    }
}
