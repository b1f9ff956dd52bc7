//! Command-line laboratory for the `poiseuille-core` solvers: configuration,
//! thread pool, and the artifacts each command writes.

pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod run;
pub mod table;

use std::path::Path;

pub use config::{Command, RunConfig, Settings};
pub use error::LabError;
pub use parallel::RayonExecutor;
pub use run::{run, Outcome};

/// Reads the optional config file, applies flag overrides, validates and runs.
pub fn execute(command: Command, config: Option<&Path>, flags: Settings, jobs: Option<usize>) -> Result<Outcome, LabError> {
    let base = match config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    let cfg = RunConfig::resolve(command, base.overlay(flags))?;
    let exec = RayonExecutor::new(jobs)?;
    run(&cfg, &exec)
}
