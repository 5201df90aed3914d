//! Initial size distributions.

use std::fs;
use std::path::PathBuf;

use log::warn;
use mitosis_core::{primal_eigenfunction, sample, Grid, GridFunction, ModelParams};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    F0,
    F1,
    /// `exp(-(x - center)² / (2 width²))`.
    Gaussian {
        center: f64,
        width: f64,
    },
    /// 1 on `[lo, hi]`, 0 elsewhere.
    Indicator {
        lo: f64,
        hi: f64,
    },
    /// `Σ cₘ fₘ` with the raw (leading coefficient 1) eigenfunctions.
    ModeMix(Vec<f64>),
    /// Two-column `x,u` file, linearly interpolated, zero outside its range.
    Csv(PathBuf),
}

fn call_args<'a>(spec: &'a str, name: &str) -> Option<&'a str> {
    spec.strip_prefix(name)?
        .trim()
        .strip_prefix('(')?
        .strip_suffix(')')
}

fn numbers(spec: &str, args: &str) -> Result<Vec<f64>, CliError> {
    args.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Config(format!("ic `{spec}`: bad number `{}`", s.trim())))
        })
        .collect()
}

impl InitialCondition {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let spec = spec.trim();
        let arity = |args: &str, n: usize| -> Result<Vec<f64>, CliError> {
            let v = numbers(spec, args)?;
            if v.len() != n {
                return Err(CliError::Config(format!("ic `{spec}` takes {n} arguments")));
            }
            Ok(v)
        };
        match spec {
            "f0" => return Ok(Self::F0),
            "f1" => return Ok(Self::F1),
            _ => {}
        }
        if let Some(args) = call_args(spec, "gaussian") {
            let v = arity(args, 2)?;
            if v[1] <= 0.0 {
                return Err(CliError::Config(format!(
                    "ic `{spec}`: width must be positive"
                )));
            }
            return Ok(Self::Gaussian {
                center: v[0],
                width: v[1],
            });
        }
        if let Some(args) = call_args(spec, "indicator") {
            let v = arity(args, 2)?;
            if v[0] >= v[1] {
                return Err(CliError::Config(format!("ic `{spec}`: need lo < hi")));
            }
            return Ok(Self::Indicator { lo: v[0], hi: v[1] });
        }
        if let Some(args) = call_args(spec, "mode-mix") {
            let v = numbers(spec, args)?;
            return Ok(Self::ModeMix(v));
        }
        if spec.ends_with(".csv") {
            return Ok(Self::Csv(PathBuf::from(spec)));
        }
        Err(CliError::Config(format!(
            "unknown initial condition `{spec}` (f0, f1, gaussian(c,w), indicator(lo,hi), mode-mix(c0,...), or a .csv path)"
        )))
    }

    /// Samples the initial condition on `grid`.
    pub fn build(&self, grid: &Grid, p: &ModelParams, tol: f64) -> Result<GridFunction, CliError> {
        let u = match self {
            Self::F0 | Self::F1 => {
                let m = usize::from(*self == Self::F1);
                let f = primal_eigenfunction(m, p, tol)?;
                sample(|x| f.eval(x), grid)
            }
            Self::Gaussian { center, width } => sample(
                |x| (-(x - center) * (x - center) / (2.0 * width * width)).exp(),
                grid,
            ),
            Self::Indicator { lo, hi } => {
                sample(|x| if x >= *lo && x <= *hi { 1.0 } else { 0.0 }, grid)
            }
            Self::ModeMix(coeffs) => {
                let modes = coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, &c)| Ok((c, primal_eigenfunction(m, p, tol)?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                sample(|x| modes.iter().map(|(c, f)| c * f.eval(x)).sum(), grid)
            }
            Self::Csv(path) => {
                let (xs, us) = read_profile(path)?;
                sample(|x| interpolate(&xs, &us, x), grid)
            }
        };
        Ok(u)
    }
}

fn read_profile(path: &PathBuf) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_profile(&text, &path.display().to_string())
}

pub(crate) fn parse_profile(text: &str, name: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(CliError::Config(format!(
                "{name}:{}: expected two columns",
                lineno + 1
            )));
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(u)) if x.is_finite() && u.is_finite() => {
                xs.push(x);
                us.push(u);
            }
            // header row
            _ if xs.is_empty() && a.parse::<f64>().is_err() => continue,
            _ => {
                return Err(CliError::Config(format!(
                    "{name}:{}: bad numbers",
                    lineno + 1
                )));
            }
        }
    }
    if xs.len() < 2 {
        return Err(CliError::Config(format!(
            "{name}: need at least two samples"
        )));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config(format!(
            "{name}: x must be strictly increasing"
        )));
    }
    if us.iter().any(|u| *u < 0.0) {
        warn!("{name}: initial data has negative entries; continuing with signed data");
    }
    Ok((xs, us))
}

fn interpolate(xs: &[f64], us: &[f64], x: f64) -> f64 {
    if x < xs[0] || x > xs[xs.len() - 1] {
        return 0.0;
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let w = (x - x0) / (x1 - x0);
    us[i - 1] * (1.0 - w) + us[i] * w
}
