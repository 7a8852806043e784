//! Batch front-end: reads a JSON run configuration and writes CSV/JSON results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;

use std::path::Path;

use clap::ValueEnum;

pub use error::{CliError, Issue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Budget,
    Optimize,
    Fdt,
    GwMc,
    Synth,
}

/// Read the config at `config` and run `cmd`, writing to `out`.
pub fn run(cmd: Command, config: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| CliError::Io(format!("{}: {e}", config.display())))?;
    let cfg = config::parse(&text)?;
    match cmd {
        Command::Budget => commands::budget(&cfg, out),
        Command::Optimize => commands::optimize(&cfg, out),
        Command::Fdt => commands::fdt(&cfg, out),
        Command::GwMc => commands::gw_mc(&cfg, out, seed),
        Command::Synth => commands::synth(&cfg, out, seed),
    }
}
