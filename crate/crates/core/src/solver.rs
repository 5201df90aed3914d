//! Time marching of `∂ₜu + g ∂ₓu + b u = 4 b u(t, 2x)` with `u(t, 0) = 0`.
//!
//! One step of length `dt = h / g` is a Lie splitting:
//!
//! 1. transport, exact: every value moves one cell to the right and the
//!    boundary node is set to zero;
//! 2. loss and gain: `uᵢ ← e^{-b dt} uᵢ + 4 b dt u₂ᵢ`, where `u₂ᵢ` is the
//!    transported value at `2xᵢ` and zero beyond `x_max`.
//!
//! Both substeps map nonnegative data to nonnegative data and the scheme is
//! linear, so it is a discrete positive semigroup.

use log::warn;

use crate::eigenbasis::ModelParams;
use crate::error::{Error, Result};
use crate::numerics::{trapezoid, Grid, GridFunction};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    grid: Grid,
    params: ModelParams,
    dt: f64,
    snapshot_times: Vec<f64>,
    snapshot_steps: Vec<usize>,
}

impl SolverConfig {
    /// Configuration with `dt = h / g` and snapshots at the steps nearest to
    /// `snapshot_times`, which must be sorted and nonnegative.
    pub fn new(grid: Grid, params: ModelParams, snapshot_times: Vec<f64>) -> Result<Self> {
        if snapshot_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::InvalidSnapshotTimes(
                "times must be finite and nonnegative".into(),
            ));
        }
        if snapshot_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSnapshotTimes("times must be sorted".into()));
        }
        let dt = grid.h() / params.g();
        let snapshot_steps = snapshot_times
            .iter()
            .map(|t| (t / dt).round() as usize)
            .collect();
        Ok(Self {
            grid,
            params,
            dt,
            snapshot_times,
            snapshot_steps,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Requested snapshot times.
    pub fn snapshot_times(&self) -> &[f64] {
        &self.snapshot_times
    }

    pub fn snapshot_steps(&self) -> &[usize] {
        &self.snapshot_steps
    }

    /// Largest gap between a requested time and the step it was rounded to.
    pub fn max_rounding(&self) -> f64 {
        self.snapshot_times
            .iter()
            .zip(&self.snapshot_steps)
            .map(|(t, &k)| (t - k as f64 * self.dt).abs())
            .fold(0.0, f64::max)
    }
}

/// Solution at one snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    /// Time actually reached, a whole number of steps.
    pub time: f64,
    pub requested: f64,
    pub u: GridFunction,
}

fn advance(src: &[f64], dst: &mut [f64], decay: f64, gain: f64) {
    let n = src.len() - 1;
    dst[0] = 0.0;
    for i in 1..=n {
        let source = if 2 * i <= n { src[2 * i - 1] } else { 0.0 };
        dst[i] = decay * src[i - 1] + gain * source;
    }
}

fn rates(cfg: &SolverConfig) -> (f64, f64) {
    let b = cfg.params.b();
    ((-b * cfg.dt).exp(), 4.0 * b * cfg.dt)
}

/// One splitting step.
pub fn step(u: &GridFunction, cfg: &SolverConfig) -> Result<GridFunction> {
    if u.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    let (decay, gain) = rates(cfg);
    let mut out = GridFunction::zeros(&cfg.grid);
    advance(u.values(), out.values_mut(), decay, gain);
    Ok(out)
}

/// Runs the scheme from `u0` and returns a copy of the solution at every
/// configured snapshot. Signed data is accepted with a warning.
pub fn solve(u0: &GridFunction, cfg: &SolverConfig) -> Result<Vec<Snapshot>> {
    if u0.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    if u0.min_value() < 0.0 {
        warn!("initial data has negative values; positivity is not guaranteed");
    }
    march(u0, cfg)
}

/// [`solve`] without the sign check, for internally built signed data.
pub(crate) fn march(u0: &GridFunction, cfg: &SolverConfig) -> Result<Vec<Snapshot>> {
    if u0.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    let (decay, gain) = rates(cfg);
    let mut current = u0.values().to_vec();
    let mut scratch = vec![0.0; current.len()];
    let mut steps_done = 0usize;
    let mut out = Vec::with_capacity(cfg.snapshot_steps.len());
    for (&requested, &target) in cfg.snapshot_times.iter().zip(&cfg.snapshot_steps) {
        while steps_done < target {
            advance(&current, &mut scratch, decay, gain);
            std::mem::swap(&mut current, &mut scratch);
            steps_done += 1;
        }
        out.push(Snapshot {
            time: steps_done as f64 * cfg.dt,
            requested,
            u: GridFunction::new(cfg.grid.clone(), current.clone())?,
        });
    }
    Ok(out)
}

/// Signed trapezoid integral of `u`, the total number of cells.
pub fn total_mass(u: &GridFunction) -> f64 {
    trapezoid(u.values(), u.grid().h())
}
