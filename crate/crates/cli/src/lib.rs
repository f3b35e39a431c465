//! Scenario runner for the exchanger steering experiments: parses flat
//! config documents, dispatches commands and writes CSV artifacts.

pub mod config;
pub mod export;
pub mod runner;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{load_config, parse_config, parse_config_with, serialize, Command, Overrides, ScenarioConfig};
pub use export::{export_csv, export_summary, Table};
pub use runner::{run_scenario, RunReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] config::LoadError),
    #[error(transparent)]
    Run(#[from] runner::RunError),
    #[error(transparent)]
    Export(#[from] export::ExportError),
    #[error("EXSTEER_THREADS = `{0}`: expected a positive integer")]
    Threads(String),
}

/// Reads `EXSTEER_THREADS`. Every command runs serially, so the value only
/// needs to be well formed.
pub fn thread_cap(raw: Option<&str>) -> Result<Option<usize>, CliError> {
    match raw {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Threads(s.to_string())),
        },
    }
}

/// Runs the scenario and writes its CSV files plus `report.txt` into the
/// configured output directory.
pub fn run_and_export(cfg: &ScenarioConfig) -> Result<(RunReport, Vec<PathBuf>), CliError> {
    let report = run_scenario(cfg)?;
    let mut paths = export_csv(&report, &cfg.output_dir)?;
    paths.push(export_summary(&report, &cfg.output_dir)?);
    Ok((report, paths))
}
