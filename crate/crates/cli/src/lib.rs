//! Experiment runner for idle quench, random-circuit (XEB) and level
//! statistics sweeps over the simulator in `mbl_core`.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{ConfigPatch, ExperimentConfig, Mode};
pub use error::{CliError, CliResult};
pub use output::ResultRow;
pub use run::{execute, run, RunOutput};

/// Environment variable read for the worker count when `--threads` is absent.
pub const THREADS_ENV: &str = "MBL_CALIB_THREADS";

/// Worker count: explicit flag, then [`THREADS_ENV`], else the rayon default.
pub fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}='{v}' is not a positive integer"))),
        Err(_) => Ok(None),
    }
}
