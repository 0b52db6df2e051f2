//! Command-line front end of `l1trend-core`: CSV ingestion, the `filter`,
//! `calibrate`, `simulate` and `backtest` commands, and their JSON reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

use std::path::PathBuf;

use args::{Cli, Command};
use config::Config;
use error::CliResult;

pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Filter(a) => commands::filter::run(a, &cfg),
        Command::Calibrate(a) => commands::calibrate::run(a, &cfg),
        Command::Simulate(a) => commands::simulate::run(a, &cfg),
        Command::Backtest(a) => commands::backtest::run(a, &cfg),
    }
}

/// Flag path, else config path; missing is a usage error.
pub(crate) fn required_path(cfg: &Config, flag: Option<PathBuf>, key: &str) -> CliResult<PathBuf> {
    cfg.pick_opt(flag, key)?
        .ok_or_else(|| error::CliError::usage(format!("--{key} is required")))
}
