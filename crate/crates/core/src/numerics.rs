//! Dyadic-closed grids and trapezoid quadrature.
//!
//! A grid with an even number of cells maps node `i` to node `2i` under the
//! doubling `x ↦ 2x` for every `i ≤ n_cells / 2`, so the nonlocal gain term
//! `u(2x)` is read directly off the nodes without interpolation.

use crate::eigenbasis::DualPolynomial;
use crate::error::{Error, Result};

/// Uniform grid `xᵢ = i h`, `i = 0..=n_cells`, on `[0, x_max]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    x_max: f64,
    n_cells: usize,
    h: f64,
}

impl Grid {
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of nodes, `n_cells + 1`.
    pub fn len(&self) -> usize {
        self.n_cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.x_max
        } else {
            i as f64 * self.h
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }
}

/// Builds a grid with `n_cells` rounded up to the next even number.
pub fn make_grid(x_max: f64, n_cells: usize) -> Result<Grid> {
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "x_max must be positive, got {x_max}"
        )));
    }
    if n_cells < 4 {
        return Err(Error::InvalidGrid(format!(
            "need at least 4 cells, got {n_cells}"
        )));
    }
    let n_cells = n_cells + n_cells % 2;
    Ok(Grid {
        x_max,
        n_cells,
        h: x_max / n_cells as f64,
    })
}

/// Nodal values of a function on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `self + a · other`.
    pub fn axpy(&self, a: f64, other: &GridFunction) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u + a * v)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Pointwise evaluation at the nodes.
pub fn sample<F>(f: F, grid: &Grid) -> GridFunction
where
    F: Fn(f64) -> f64,
{
    GridFunction {
        grid: grid.clone(),
        values: grid.nodes().map(f).collect(),
    }
}

/// `n` points spaced evenly in `ln x` on `[lo, hi]`, `0 < lo < hi`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let ratio = (hi / lo).ln();
            (0..n)
                .map(|i| lo * (ratio * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

/// Composite trapezoid rule for `values` on a uniform spacing `h`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// Trapezoid approximation of `∫₀^{x_max} |u(x)| (1 + x)^k dx`.
pub fn weighted_l1_norm(u: &GridFunction, k: f64) -> f64 {
    let grid = &u.grid;
    let integrand: Vec<f64> = u
        .values
        .iter()
        .zip(grid.nodes())
        .map(|(v, x)| v.abs() * (1.0 + x).powf(k))
        .collect();
    trapezoid(&integrand, grid.h)
}

/// Trapezoid approximation of `∫₀^{x_max} φ(x) u(x) dx`.
pub fn inner_product_grid(phi: &DualPolynomial, u: &GridFunction) -> f64 {
    let integrand: Vec<f64> = u
        .values
        .iter()
        .zip(u.grid.nodes())
        .map(|(v, x)| phi.eval(x) * v)
        .collect();
    trapezoid(&integrand, u.grid.h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::{
        dual_eigenfunction, mass_normalized_f0, primal_eigenfunction, ModelParams, DEFAULT_TOL,
    };
    use approx::assert_relative_eq;

    #[test]
    fn grid_examples() {
        let g = make_grid(10.0, 100).unwrap();
        assert_relative_eq!(g.h(), 0.1, max_relative = 1e-15);
        assert_relative_eq!(g.node(50), 5.0, max_relative = 1e-15);
        assert_eq!(2.0 * g.node(25), g.node(50));
        assert_eq!(make_grid(1.0, 5).unwrap().n_cells(), 6);
        assert_relative_eq!(
            make_grid(20.0, 2000).unwrap().h(),
            0.01,
            max_relative = 1e-15
        );
        let g = make_grid(3.0, 7).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(g.n_cells()), 3.0);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(make_grid(0.0, 10).is_err());
        assert!(make_grid(-1.0, 10).is_err());
        assert!(make_grid(f64::INFINITY, 10).is_err());
        assert!(make_grid(1.0, 3).is_err());
    }

    #[test]
    fn dyadic_closure() {
        let g = make_grid(7.0, 130).unwrap();
        for i in 0..=g.n_cells() / 2 {
            assert_eq!(2.0 * g.node(i), g.node(2 * i));
        }
    }

    #[test]
    fn sampling() {
        let g = make_grid(10.0, 100).unwrap();
        assert!(sample(|_| 1.0, &g).values().iter().all(|&v| v == 1.0));
        let id = sample(|x| x, &g);
        for (i, v) in id.values().iter().enumerate() {
            assert_relative_eq!(*v, i as f64 * 0.1, epsilon = 1e-12);
        }
        let f0 = primal_eigenfunction(0, &ModelParams::default(), DEFAULT_TOL).unwrap();
        assert!(sample(|x| f0.eval(x), &g).values()[0].abs() < 1e-13);
    }

    #[test]
    fn norms_of_simple_functions() {
        let g = make_grid(1.0, 50).unwrap();
        let h2 = g.h() * g.h();
        let one = sample(|_| 1.0, &g);
        assert!((weighted_l1_norm(&one, 0.0) - 1.0).abs() <= h2);
        assert!((weighted_l1_norm(&one, 1.0) - 1.5).abs() <= h2);
        let neg = one.scale(-1.0);
        assert_eq!(weighted_l1_norm(&neg, 0.0), weighted_l1_norm(&one, 0.0));
    }

    #[test]
    fn normalized_f0_has_unit_norm() {
        let p = ModelParams::default();
        let f0n = mass_normalized_f0(&p, DEFAULT_TOL).unwrap();
        let g = make_grid(30.0, 3000).unwrap();
        let u = sample(|x| f0n.eval(x), &g);
        assert!((weighted_l1_norm(&u, 0.0) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn grid_pairings_with_f0() {
        let p = ModelParams::default();
        let g = make_grid(30.0, 3000).unwrap();
        let f0 = primal_eigenfunction(0, &p, DEFAULT_TOL).unwrap();
        let f1 = primal_eigenfunction(1, &p, DEFAULT_TOL).unwrap();
        let phi0 = dual_eigenfunction(0, &p, &f0).unwrap();
        let phi1 = dual_eigenfunction(1, &p, &f1).unwrap();
        let u = sample(|x| f0.eval(x), &g);
        assert!((inner_product_grid(&phi0, &u) - 1.0).abs() < 1e-4);
        assert!(inner_product_grid(&phi1, &u).abs() < 1e-4);

        let one = DualPolynomial::provisional(0, &p);
        let bump = sample(|x| (-(x - 4.0) * (x - 4.0)).exp(), &g);
        assert_eq!(
            inner_product_grid(&one, &bump),
            trapezoid(bump.values(), g.h())
        );
    }

    #[test]
    fn quadrature_is_second_order() {
        let f = |x: f64| x * (-x).exp();
        let exact = 1.0 - 11.0 * (-10.0f64).exp();
        let err = |n: usize| {
            let g = make_grid(10.0, n).unwrap();
            (weighted_l1_norm(&sample(f, &g), 0.0) - exact).abs()
        };
        let ratio = err(200) / err(400);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn axpy_requires_same_grid() {
        let a = GridFunction::zeros(&make_grid(1.0, 10).unwrap());
        let b = GridFunction::zeros(&make_grid(1.0, 12).unwrap());
        assert_eq!(a.axpy(1.0, &b), Err(Error::GridMismatch));
        assert!(GridFunction::new(make_grid(1.0, 10).unwrap(), vec![0.0; 3]).is_err());
    }
}
