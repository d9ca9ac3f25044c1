//! Experiment runner for the coarse-lab numerical laboratory.
//!
//! Each experiment loads a family manifest, runs one analysis from
//! `coarse-core` over it and writes CSV tables, a `summary.json` and
//! optional SVG plots into an output directory.

pub mod error;
pub mod experiments;
pub mod manifest;
pub mod output;

pub use error::{LabError, Result};
pub use experiments::{execute, run, Context, Experiment, ExperimentSpec, Overrides, RunOutcome};
pub use manifest::{Family, Manifest};
pub use output::Report;

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "COARSE_LAB_THREADS";

/// Configures the global thread pool from [`THREADS_ENV`], if set.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| LabError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
    // a pool that is already configured is left as is
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
