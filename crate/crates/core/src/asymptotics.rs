//! Long-time expansion of solutions on the explicit eigenbasis.
//!
//! For an abscissa `a ∈ (-b, b)` the weight threshold is
//! `k_a = log₂(2b / (b + a))` and the eigenvalues to the right of `a` are
//! `λ₀, …, λ_{m_a}` with `m_a = ⌈k_a - 1⌉`. In `L¹ₖ` with `k > max(1, k_a)`
//! the residual `u(t) - Σ_{m ≤ m_a} ⟨φₘ, u₀⟩ e^{λₘ t} fₘ` decays like
//! `e^{a t}`. [`residual_series`] measures that residual on a simulated
//! solution and fits its exponential rate.

use log::warn;

use crate::eigenbasis::{
    dual_eigenfunction, eigenvalue, primal_eigenfunction, DualPolynomial, ExponentialSum,
    ModelParams,
};
use crate::error::{Error, Result};
use crate::numerics::{inner_product_grid, sample, weighted_l1_norm, GridFunction};
use crate::solver::{march, solve, SolverConfig};

/// `|α_{M+1}|` below this fraction of `‖u₀‖_{L¹}` makes a rate check inconclusive.
pub const INCONCLUSIVE_RTOL: f64 = 1e-8;

/// A residual that never exceeds this multiple of the floor estimate over the
/// fit window is indistinguishable from discretization error.
pub const FLOOR_MARGIN: f64 = 10.0;

fn check_abscissa(a: f64, p: &ModelParams) -> Result<()> {
    let b = p.b();
    if !(a > -b && a < b) {
        return Err(Error::AbscissaOutOfRange { a, b });
    }
    Ok(())
}

/// `k_a = log₂(2b / (b + a))`.
pub fn k_threshold(a: f64, p: &ModelParams) -> Result<f64> {
    check_abscissa(a, p)?;
    let b = p.b();
    Ok((2.0 * b / (b + a)).log2())
}

/// `m_a = ⌈k_a - 1⌉`, the index with `λ_{m_a+1} ≤ a < λ_{m_a}`.
///
/// The ceiling can land one off when `a` sits within rounding of an
/// eigenvalue; the bracketing against the eigenvalues themselves decides.
pub fn dominant_count(a: f64, p: &ModelParams) -> Result<usize> {
    let k_a = k_threshold(a, p)?;
    let mut m = (k_a - 1.0).ceil().max(0.0) as usize;
    while m > 0 && a >= eigenvalue(m, p) {
        m -= 1;
    }
    while eigenvalue(m + 1, p) > a {
        m += 1;
    }
    debug_assert!(eigenvalue(m + 1, p) <= a && a < eigenvalue(m, p));
    Ok(m)
}

/// Dominant spectrum to the right of an abscissa.
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    pub a: f64,
    pub k_a: f64,
    pub m_a: usize,
    /// `λ₀, …, λ_{m_a}`, strictly decreasing.
    pub dominant_eigenvalues: Vec<f64>,
}

pub fn spectrum_table(a_values: &[f64], p: &ModelParams) -> Result<Vec<ThresholdReport>> {
    a_values
        .iter()
        .map(|&a| {
            let k_a = k_threshold(a, p)?;
            let m_a = dominant_count(a, p)?;
            Ok(ThresholdReport {
                a,
                k_a,
                m_a,
                dominant_eigenvalues: (0..=m_a).map(|m| eigenvalue(m, p)).collect(),
            })
        })
        .collect()
}

/// Primal and normalized dual eigenfunctions `f₀…f_M`, `φ₀…φ_M`.
#[derive(Clone, Debug)]
pub struct Eigenbasis {
    params: ModelParams,
    primal: Vec<ExponentialSum>,
    dual: Vec<DualPolynomial>,
}

impl Eigenbasis {
    pub fn new(params: ModelParams, max_index: usize, tol: f64) -> Result<Self> {
        let mut primal = Vec::with_capacity(max_index + 1);
        let mut dual = Vec::with_capacity(max_index + 1);
        for m in 0..=max_index {
            let f = primal_eigenfunction(m, &params, tol)?;
            dual.push(dual_eigenfunction(m, &params, &f)?);
            primal.push(f);
        }
        Ok(Self {
            params,
            primal,
            dual,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn max_index(&self) -> usize {
        self.primal.len() - 1
    }

    pub fn primal(&self, m: usize) -> &ExponentialSum {
        &self.primal[m]
    }

    pub fn dual(&self, m: usize) -> &DualPolynomial {
        &self.dual[m]
    }

    pub fn eigenvalue(&self, m: usize) -> f64 {
        eigenvalue(m, &self.params)
    }

    fn require(&self, m: usize) -> Result<()> {
        if m > self.max_index() {
            return Err(Error::BasisTooSmall {
                requested: m,
                available: self.max_index(),
            });
        }
        Ok(())
    }

    /// `Σ coeffs[m] e^{λₘ t} fₘ` sampled on the grid of `like`.
    pub fn mode_sum(&self, coeffs: &[f64], t: f64, like: &GridFunction) -> Result<GridFunction> {
        self.require(coeffs.len().saturating_sub(1))?;
        let weights: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .map(|(m, a)| a * (self.eigenvalue(m) * t).exp())
            .collect();
        Ok(sample(
            |x| {
                weights
                    .iter()
                    .zip(&self.primal)
                    .map(|(w, f)| w * f.eval(x))
                    .sum()
            },
            like.grid(),
        ))
    }
}

/// `αₘ = ⟨φₘ, u₀⟩` by grid quadrature, `m = 0..=order`.
pub fn expansion_coefficients(
    basis: &Eigenbasis,
    u0: &GridFunction,
    order: usize,
) -> Result<Vec<f64>> {
    basis.require(order)?;
    Ok((0..=order)
        .map(|m| inner_product_grid(basis.dual(m), u0))
        .collect())
}

/// Time window `[start, end]` of the least-squares rate fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitWindow {
    pub start: f64,
    pub end: f64,
}

impl FitWindow {
    /// `[1/b, 3/b]`.
    pub fn default_for(p: &ModelParams) -> Self {
        Self {
            start: 1.0 / p.b(),
            end: 3.0 / p.b(),
        }
    }

    fn contains(&self, t: f64) -> bool {
        t >= self.start - 1e-12 && t <= self.end + 1e-12
    }
}

/// Residual decay of the order-`M` expansion on one simulated solution.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport {
    pub order: usize,
    /// `α₀, …, α_M`.
    pub coefficients: Vec<f64>,
    /// `α_{M+1}`, the amplitude of the mode that should set the rate.
    pub next_coefficient: f64,
    pub k: f64,
    /// `(t, r_M(t))` with `r_M(t) = ‖u(t) - Σ αₘ e^{λₘ t} fₘ‖_{L¹ₖ}`.
    pub residuals: Vec<(f64, f64)>,
    pub fitted_rate: f64,
    /// `λ_{M+1}`.
    pub target_rate: f64,
    pub window: FitWindow,
    /// Largest residual over the window when only the retained modes are
    /// evolved: the discretization floor of this experiment.
    pub floor_estimate: f64,
    /// `(t, r_M(t))` of the retained-mode run behind `floor_estimate`.
    pub floor_residuals: Vec<(f64, f64)>,
    /// Set when `|α_{M+1}|` is too small for the rate to be `λ_{M+1}`, or
    /// when the residual stays within [`FLOOR_MARGIN`] of the floor estimate.
    pub inconclusive: bool,
}

impl ExpansionReport {
    /// Rate of `e^{-λ₀ t} r_M(t)`, the residual measured against the
    /// Malthusian growth.
    pub fn rescaled_fitted_rate(&self, p: &ModelParams) -> f64 {
        self.fitted_rate - eigenvalue(0, p)
    }
}

fn residuals(
    basis: &Eigenbasis,
    coeffs: &[f64],
    snapshots: &[crate::solver::Snapshot],
    k: f64,
) -> Result<Vec<(f64, f64)>> {
    snapshots
        .iter()
        .map(|s| {
            let modes = basis.mode_sum(coeffs, s.time, &s.u)?;
            let r = s.u.axpy(-1.0, &modes)?;
            Ok((s.time, weighted_l1_norm(&r, k)))
        })
        .collect()
}

/// Least-squares slope of `ln r` against `t` over the points in `window`.
pub fn fit_rate(series: &[(f64, f64)], window: FitWindow) -> Result<f64> {
    if series.iter().all(|&(_, r)| r == 0.0) {
        return Err(Error::FitImpossible("every residual is zero".into()));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, r)| window.contains(*t) && *r > 0.0 && r.is_finite())
        .map(|&(t, r)| (t, r.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::FitImpossible(format!(
            "{} usable residuals in [{}, {}]",
            pts.len(),
            window.start,
            window.end
        )));
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(t, y)| (t - mean_t) * (y - mean_y)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mean_t).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::FitImpossible("all residuals at one time".into()));
    }
    Ok(sxy / sxx)
}

/// Simulates `u0`, measures the order-`order` residual in `L¹ₖ` at every
/// snapshot of `cfg` and fits its decay rate over `window`.
///
/// The basis must reach index `order + 1`. A second run evolves only the
/// retained modes to estimate the discretization floor; the two runs are
/// independent and execute on separate threads.
pub fn residual_series(
    basis: &Eigenbasis,
    u0: &GridFunction,
    order: usize,
    k: f64,
    cfg: &SolverConfig,
    window: FitWindow,
) -> Result<ExpansionReport> {
    basis.require(order + 1)?;
    let p = basis.params();
    let target_rate = eigenvalue(order + 1, p);
    let needed = k_threshold(target_rate, p)?.max(1.0);
    if k <= needed {
        warn!("weight k = {k} does not exceed max(1, k_a) = {needed} for a = {target_rate}");
    }

    let all = expansion_coefficients(basis, u0, order + 1)?;
    let coefficients = all[..=order].to_vec();
    let next_coefficient = all[order + 1];
    let modes0 = basis.mode_sum(&coefficients, 0.0, u0)?;

    let (main, floor) = std::thread::scope(|scope| {
        let floor = scope.spawn(|| march(&modes0, cfg));
        let main = solve(u0, cfg);
        (main, floor.join().expect("floor run panicked"))
    });
    let residuals = residuals(basis, &coefficients, &main?, k)?;
    let floor_series = self::residuals(basis, &coefficients, &floor?, k)?;

    let fitted_rate = fit_rate(&residuals, window)?;
    let floor_estimate = floor_series
        .iter()
        .filter(|(t, _)| window.contains(*t))
        .map(|&(_, r)| r)
        .fold(0.0, f64::max);
    let peak = residuals
        .iter()
        .filter(|(t, _)| window.contains(*t))
        .map(|&(_, r)| r)
        .fold(0.0, f64::max);
    let inconclusive = next_coefficient.abs() < INCONCLUSIVE_RTOL * weighted_l1_norm(u0, 0.0)
        || peak <= FLOOR_MARGIN * floor_estimate;

    Ok(ExpansionReport {
        order,
        coefficients,
        next_coefficient,
        k,
        residuals,
        fitted_rate,
        target_rate,
        window,
        floor_estimate,
        floor_residuals: floor_series,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::DEFAULT_TOL;
    use crate::numerics::make_grid;
    use approx::assert_relative_eq;

    fn unit() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn threshold_examples() {
        let p = unit();
        assert_eq!(k_threshold(0.0, &p).unwrap(), 1.0);
        assert_eq!(k_threshold(-0.5, &p).unwrap(), 2.0);
        assert_eq!(k_threshold(-0.75, &p).unwrap(), 3.0);
        assert_eq!(dominant_count(0.0, &p).unwrap(), 0);
        assert_eq!(dominant_count(-0.5, &p).unwrap(), 1);
        assert_eq!(dominant_count(-0.75, &p).unwrap(), 2);
    }

    #[test]
    fn abscissa_range_enforced() {
        let p = unit();
        for a in [-1.0, 1.0, 2.0, f64::NAN] {
            assert!(k_threshold(a, &p).is_err());
            assert!(dominant_count(a, &p).is_err());
        }
        assert!(spectrum_table(&[0.0, 1.5], &p).is_err());
    }

    #[test]
    fn spectrum_rows() {
        let p = unit();
        let rows = spectrum_table(&[0.0, -0.5, -0.875], &p).unwrap();
        assert_eq!(rows[0].dominant_eigenvalues, vec![1.0]);
        assert_eq!(rows[1].dominant_eigenvalues, vec![1.0, 0.0]);
        assert_eq!(rows[2].k_a, 4.0);
        assert_eq!(rows[2].m_a, 3);
        assert_eq!(rows[2].dominant_eigenvalues, vec![1.0, 0.0, -0.5, -0.75]);
    }

    #[test]
    fn fit_recovers_exact_exponential() {
        let series: Vec<(f64, f64)> = (0..=40)
            .map(|i| {
                let t = i as f64 * 0.1;
                (t, 3.0 * (-0.7 * t).exp())
            })
            .collect();
        let rate = fit_rate(
            &series,
            FitWindow {
                start: 1.0,
                end: 3.0,
            },
        )
        .unwrap();
        assert_relative_eq!(rate, -0.7, max_relative = 1e-12);
        assert!(fit_rate(
            &[(1.0, 0.0), (2.0, 0.0)],
            FitWindow {
                start: 0.0,
                end: 3.0
            }
        )
        .is_err());
        assert!(fit_rate(
            &[(1.0, 1.0)],
            FitWindow {
                start: 0.0,
                end: 3.0
            }
        )
        .is_err());
    }

    #[test]
    fn coefficients_of_mode_mixture() {
        let p = unit();
        let basis = Eigenbasis::new(p, 3, DEFAULT_TOL).unwrap();
        let grid = make_grid(30.0, 6000).unwrap();
        let (f0, f1) = (basis.primal(0).clone(), basis.primal(1).clone());
        let u0 = sample(|x| f0.eval(x), &grid);
        let a = expansion_coefficients(&basis, &u0, 3).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-5);
        assert!(a[1..].iter().all(|v| v.abs() < 1e-5));
        let u0 = sample(|x| 2.0 * f0.eval(x) + 3.0 * f1.eval(x), &grid);
        let a = expansion_coefficients(&basis, &u0, 2).unwrap();
        assert!((a[0] - 2.0).abs() < 1e-4 && (a[1] - 3.0).abs() < 1e-4 && a[2].abs() < 1e-4);
        assert!(expansion_coefficients(&basis, &u0, 4).is_err());
    }

    #[test]
    fn alpha0_is_mass_with_unit_mass_f0() {
        let p = unit();
        let basis = Eigenbasis::new(p, 1, DEFAULT_TOL).unwrap();
        let grid = make_grid(30.0, 3000).unwrap();
        let u0 = sample(|x| (-(x - 5.0) * (x - 5.0) / 2.0).exp(), &grid);
        // φ₀ for raw f₀ is 1/‖f₀‖; rescaling f₀ to unit mass makes it 1.
        let mass = crate::solver::total_mass(&u0);
        let alpha0 = expansion_coefficients(&basis, &u0, 0).unwrap()[0];
        let f0_mass = basis.primal(0).moment(0);
        assert_relative_eq!(alpha0 * f0_mass, mass, max_relative = 1e-12);
    }
}
