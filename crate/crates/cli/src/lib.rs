//! Experiment harness behind the `dpgrid` binary: wind dataset synthesis,
//! WPO and TCO sweeps with plot-ready CSV output, and the acceptance suite.

pub mod acceptance;
pub mod config;
pub mod curve;
pub mod error;
pub mod output;
pub mod stats;
pub mod tco_exp;
pub mod wind;
pub mod wpo_exp;

pub use config::RunConfig;
pub use error::{CliError, Result};

/// A worker pool with exactly `jobs` threads.
pub fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Run(format!("worker pool: {e}")))
}
