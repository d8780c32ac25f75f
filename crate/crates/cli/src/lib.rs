//! Command-line front end: file ingestion, run manifests and reports.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;
pub mod manifest;
pub mod report;

use args::{Cli, Commands};
use error::{CliError, CliResult};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "COVERAGE_GA_THREADS";

/// Configures the global thread pool from [`THREADS_ENV`] when set.
pub fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

pub fn manifest_for(cli: &Cli) -> CliResult<manifest::RunManifest> {
    match &cli.command {
        Commands::Coverage(a) => manifest::coverage(a),
        Commands::Select(a) => manifest::select(a),
        Commands::Evaluate(a) => manifest::evaluate(a),
        Commands::Stats(a) => manifest::stats(a),
    }
}

pub fn run(cli: &Cli) -> CliResult<String> {
    let m = manifest_for(cli)?;
    commands::execute(&m)
}
