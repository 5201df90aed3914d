//! Spectral toolkit for the growth and equal-mitosis equation
//!
//! ```text
//! ∂ₜu + g ∂ₓu + b u = 4 b u(t, 2x),   x > 0,   u(t, 0) = 0.
//! ```
//!
//! Cells grow at constant speed `g` and split into two halves at constant
//! rate `b`. The operator `L f = -g f' - b f + 4 b f(2x)` has the explicit
//! eigenvalues `λₘ = (2^{1-m} - 1) b` with Dirichlet-series eigenfunctions
//! `fₘ` and polynomial dual eigenfunctions `φₘ`, normalized so that
//! `⟨φₙ, fₘ⟩ = δₙₘ`.
//!
//! # Modules
//!
//! - [`eigenbasis`]: eigenvalues, primal series `fₘ`, dual polynomials `φₘ`,
//!   exact moments and pairings.
//! - [`numerics`]: dyadic-closed grids, weighted L¹ norms and grid pairings.
//! - [`solver`]: exact-shift splitting scheme realizing the evolution semigroup.
//! - [`asymptotics`]: spectral thresholds, expansion coefficients and fitted
//!   decay rates of the expansion residual.
//!
//! All values are immutable after construction and every operation is a pure
//! function, so experiments can be run from several threads at once.

pub mod asymptotics;
pub mod eigenbasis;
mod error;
pub mod numerics;
pub mod solver;

pub use error::{Error, Result};

pub use asymptotics::{
    dominant_count, expansion_coefficients, fit_rate, k_threshold, residual_series, spectrum_table,
    Eigenbasis, ExpansionReport, FitWindow, ThresholdReport, FLOOR_MARGIN, INCONCLUSIVE_RTOL,
};
pub use eigenbasis::{
    adjoint_residual, apply_adjoint, dual_eigenfunction, eigen_residual, eigenvalue,
    mass_normalized_f0, pairing, primal_eigenfunction, DualPolynomial, ExponentialSum, ModelParams,
    DEFAULT_TOL,
};
pub use numerics::{
    inner_product_grid, log_spaced, make_grid, sample, trapezoid, weighted_l1_norm, Grid,
    GridFunction,
};
pub use solver::{solve, step, total_mass, Snapshot, SolverConfig};
