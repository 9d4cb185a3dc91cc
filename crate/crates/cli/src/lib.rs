//! Pipeline layer over the core toolkit: ingestion, command dispatch, and
//! deterministic CSV emission with a checksum manifest.

pub mod commands;
pub mod config;
pub mod ingest;
pub mod manifest;

use config::{Command, RunConfig};

/// Dispatches one configured run. Every artifact lands under `config.out`;
/// the returned manifest path records what was written or skipped.
pub fn run(config: &RunConfig) -> anyhow::Result<std::path::PathBuf> {
    std::fs::create_dir_all(&config.out)?;
    match config.cmd {
        Command::CalibrateMarket => commands::calibrate_market::run(config),
        Command::CalibrateTheta => commands::calibrate_theta::run(config),
        Command::TestSharpe => commands::test_sharpe::run(config),
        Command::SolvePolicy => commands::solve_policy::run(config),
        Command::RunArena => commands::run_arena::run(config),
        Command::Empirics => commands::empirics_cmd::run(config),
        Command::ReproduceAll => commands::reproduce::run(config),
    }
}
