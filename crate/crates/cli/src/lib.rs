//! Command-line driver for `mitosis-core`.
//!
//! Four commands share one configuration: `eigen` tabulates the eigenbasis,
//! `simulate` runs the evolution equation, `expansion` measures the decay of
//! the expansion residual and `spectrum` lists the dominant eigenvalues for a
//! set of abscissas. Settings come from an optional `key=value` file and
//! command-line flags, flags winning.

pub mod commands;
pub mod config;
pub mod initial;
pub mod output;
pub mod svg;

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::{read_config_file, CommandName, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] mitosis_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mitosis",
    version,
    about = "Spectral analysis of the growth and equal-mitosis equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// key=value configuration file; flags override its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Growth speed.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Division rate.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Right end of the size domain (default 30 g/b).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub xmax: Option<String>,
    /// Number of grid cells, rounded up to even (default h = 0.005 g/b).
    #[arg(long, global = true)]
    pub cells: Option<String>,
    /// Time step; selects the grid through h = g dt and overrides --cells.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub dt: Option<String>,
    /// Series truncation tolerance.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tol: Option<String>,
    /// Weight exponent of the L¹ₖ norm.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Expansion order M (eigen: highest index tabulated).
    #[arg(long, global = true)]
    pub order: Option<String>,
    /// Initial condition: f0, f1, gaussian(c,w), indicator(lo,hi), mode-mix(c0,...), or x,u CSV path.
    #[arg(long, global = true)]
    pub ic: Option<String>,
    /// Comma-separated snapshot times.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub times: Option<String>,
    /// Comma-separated abscissas in (-b, b).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Rate-fit window `t1,t2` (default 1/b,3/b).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Eigenvalues, series and dual coefficients, biorthogonality and residual checks.
    Eigen,
    /// Evolve an initial condition and track the total mass.
    Simulate,
    /// Expansion coefficients and fitted decay of the expansion residual.
    Expansion,
    /// Weight thresholds and dominant eigenvalues for a list of abscissas.
    Spectrum,
}

impl Command {
    pub fn name(&self) -> CommandName {
        match self {
            Command::Eigen => CommandName::Eigen,
            Command::Simulate => CommandName::Simulate,
            Command::Expansion => CommandName::Expansion,
            Command::Spectrum => CommandName::Spectrum,
        }
    }
}

impl Cli {
    /// Config-file entries overlaid with the flags that were given.
    pub fn settings(&self) -> Result<BTreeMap<String, String>, CliError> {
        let mut settings = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let flags = [
            ("out", &self.out),
            ("g", &self.g),
            ("b", &self.b),
            ("xmax", &self.xmax),
            ("cells", &self.cells),
            ("dt", &self.dt),
            ("tol", &self.tol),
            ("k", &self.k),
            ("order", &self.order),
            ("ic", &self.ic),
            ("times", &self.times),
            ("a", &self.a),
            ("window", &self.window),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                settings.insert(key.to_string(), v.clone());
            }
        }
        Ok(settings)
    }

    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        RunConfig::from_settings(self.command.name(), &self.settings()?)
    }
}

/// Validates the configuration, runs the command and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = cli.run_config()?;
    commands::execute(&cfg)
}
