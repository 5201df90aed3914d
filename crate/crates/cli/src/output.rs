//! CSV emission.
//!
//! Every file starts with one `#` comment line recording the run parameters,
//! then a header row. Reals use 17 significant digits in scientific notation,
//! which round-trips every `f64`; lines end in `\n`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::CliError;

/// 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Quoted comma-separated list of reals.
pub fn fmt_list(xs: &[f64]) -> String {
    let inner: Vec<String> = xs.iter().map(|x| fmt_real(*x)).collect();
    format!("\"{}\"", inner.join(","))
}

pub fn comment_line(cfg: &RunConfig) -> String {
    format!(
        "# mitosis {} command={} g={} b={} h={} x_max={} dt={} tol={}",
        env!("CARGO_PKG_VERSION"),
        cfg.command.as_str(),
        fmt_real(cfg.params.g()),
        fmt_real(cfg.params.b()),
        fmt_real(cfg.h()),
        fmt_real(cfg.x_max),
        fmt_real(cfg.dt()),
        fmt_real(cfg.tol),
    )
}

/// A CSV file assembled in memory and written in one call.
pub struct CsvTable {
    text: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(cfg: &RunConfig, header: &[&str]) -> Self {
        let mut text = comment_line(cfg);
        text.push('\n');
        text.push_str(&header.join(","));
        text.push('\n');
        Self {
            text,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf, CliError> {
        let path = dir.join(name);
        fs::write(&path, &self.text)?;
        Ok(path)
    }
}
