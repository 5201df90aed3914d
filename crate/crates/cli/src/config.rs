//! Run configuration: a `key=value` file merged with command-line overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use mitosis_core::{FitWindow, ModelParams, DEFAULT_TOL};

use crate::initial::InitialCondition;
use crate::CliError;

/// Keys accepted in config files; flag names map onto the same keys.
pub const KEYS: &[&str] = &[
    "g", "b", "xmax", "cells", "dt", "tol", "k", "order", "ic", "times", "a", "window", "out",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandName {
    Eigen,
    Simulate,
    Expansion,
    Spectrum,
}

impl CommandName {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandName::Eigen => "eigen",
            CommandName::Simulate => "simulate",
            CommandName::Expansion => "expansion",
            CommandName::Spectrum => "spectrum",
        }
    }
}

/// Fully validated settings of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandName,
    pub params: ModelParams,
    pub x_max: f64,
    pub n_cells: usize,
    pub tol: f64,
    pub ic: InitialCondition,
    /// Expansion order for `expansion`, highest index for `eigen`.
    pub order: usize,
    pub k: f64,
    pub a_values: Vec<f64>,
    pub times: Vec<f64>,
    pub window: FitWindow,
    pub out_dir: PathBuf,
}

/// Reads a `key=value` file. Blank lines and lines starting with `#` are
/// skipped; unknown keys are rejected.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_settings(&text)
}

pub fn parse_settings(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", lineno + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!(
                "line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        out.insert(key.to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("{key}: `{v}` is not finite")));
    }
    Ok(x)
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

fn positive(key: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Config(format!("{key} must be positive, got {x}")))
    }
}

impl RunConfig {
    /// Validates merged settings against the preconditions of every module
    /// the command will call.
    pub fn from_settings(
        command: CommandName,
        settings: &BTreeMap<String, String>,
    ) -> Result<Self, CliError> {
        let get = |k: &str| settings.get(k).map(String::as_str);
        let num = |k: &str, default: f64| -> Result<f64, CliError> {
            get(k).map_or(Ok(default), |v| parse_f64(k, v))
        };

        let g = positive("g", num("g", 1.0)?)?;
        let b = positive("b", num("b", 1.0)?)?;
        let params = ModelParams::new(g, b).map_err(|e| CliError::Config(e.to_string()))?;
        let length = g / b;

        let x_max = positive("xmax", num("xmax", 30.0 * length)?)?;
        let mut n_cells = match get("cells") {
            Some(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("cells: `{v}` is not a positive integer")))?,
            None => (x_max / (0.005 * length)).round() as usize,
        };
        if let Some(v) = get("dt") {
            let dt = positive("dt", parse_f64("dt", v)?)?;
            n_cells = (x_max / (g * dt)).ceil() as usize;
        }
        if n_cells < 4 {
            return Err(CliError::Config(format!(
                "cells must be at least 4, got {n_cells}"
            )));
        }
        n_cells += n_cells % 2;

        let tol = num("tol", DEFAULT_TOL)?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::Config(format!(
                "tol must lie in (0, 1), got {tol}"
            )));
        }

        let order = match get("order") {
            Some(v) => v.trim().parse::<usize>().map_err(|_| {
                CliError::Config(format!("order: `{v}` is not a nonnegative integer"))
            })?,
            None if command == CommandName::Eigen => 5,
            None => 0,
        };
        if order > 30 {
            return Err(CliError::Config(format!(
                "order {order} is above the supported 30"
            )));
        }
        let k = num("k", 2.0)?;

        let window = match get("window") {
            Some(v) => {
                let w = parse_list("window", v)?;
                if w.len() != 2 || !(w[0] >= 0.0 && w[0] < w[1]) {
                    return Err(CliError::Config(format!(
                        "window must be `t1,t2` with 0 <= t1 < t2, got `{v}`"
                    )));
                }
                FitWindow {
                    start: w[0],
                    end: w[1],
                }
            }
            None => FitWindow::default_for(&params),
        };

        let times = match get("times") {
            Some(v) => parse_list("times", v)?,
            None if command == CommandName::Expansion => {
                let step = 0.05 / b;
                let n = (window.end / step).ceil() as usize;
                (0..=n).map(|i| i as f64 * step).collect()
            }
            None => vec![0.0, 1.0 / b, 2.0 / b],
        };
        if times.iter().any(|t| *t < 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(
                "times must be nonnegative and strictly increasing".into(),
            ));
        }

        let a_values = match get("a") {
            Some(v) => parse_list("a", v)?,
            None => [0.0, -0.25, -0.5, -0.75, -0.875]
                .iter()
                .map(|a| a * b)
                .collect(),
        };
        if let Some(a) = a_values.iter().find(|a| !(**a > -b && **a < b)) {
            return Err(CliError::Config(format!(
                "a = {a} lies outside (-b, b) = ({}, {b})",
                -b
            )));
        }

        let ic = match get("ic") {
            Some(v) => InitialCondition::parse(v)?,
            None => InitialCondition::Gaussian {
                center: 5.0 * length,
                width: length,
            },
        };

        let out_dir = PathBuf::from(get("out").unwrap_or("out"));

        Ok(Self {
            command,
            params,
            x_max,
            n_cells,
            tol,
            ic,
            order,
            k,
            a_values,
            times,
            window,
            out_dir,
        })
    }

    pub fn h(&self) -> f64 {
        self.x_max / self.n_cells as f64
    }

    pub fn dt(&self) -> f64 {
        self.h() / self.params.g()
    }
}
