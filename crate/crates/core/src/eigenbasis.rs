//! Primal and dual eigenfunctions of the mitosis operator.
//!
//! The primal eigenfunctions are Dirichlet series
//!
//! ```text
//! fₘ(x) = Σₙ cₙ e^{-rₙ x},   cₙ = (-1)ⁿ 2^{n(m+1)} / Πⱼ₌₁ⁿ (2ʲ - 1),   rₙ = (b/g) 2^{n+1-m},
//! ```
//!
//! and the dual eigenfunctions are polynomials of degree `m`. Everything here
//! is exact up to series truncation: moments and pairings use the closed form
//! `∫ xⁿ e^{-r x} dx = n! / r^{n+1}`.
//!
//! The series coefficients grow to about `2^{m²/2}` before they decay, and
//! `fₘ` is the small difference of such terms near the origin. Coefficients
//! are therefore carried as double-double values ([`TwoFloat`]) and all sums
//! are accumulated with error-free transformations.

use std::cmp::Ordering;

use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Default truncation tolerance of the primal series.
pub const DEFAULT_TOL: f64 = 1e-14;

/// Relative tolerance under which two rates are the same rate.
const RATE_MERGE_RTOL: f64 = 1e-12;

/// Hard cap on the length of a primal series. The coefficients decay like
/// `2^{-n²/2}`, so this is never reached for a tolerance above underflow.
const MAX_TERMS: usize = 512;

/// Growth speed `g` and division rate `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    g: f64,
    b: f64,
}

impl ModelParams {
    pub fn new(g: f64, b: f64) -> Result<Self> {
        if !(g.is_finite() && b.is_finite() && g > 0.0 && b > 0.0) {
            return Err(Error::InvalidParams { g, b });
        }
        Ok(Self { g, b })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Natural inverse length `b / g` of the problem.
    pub fn rate_scale(&self) -> f64 {
        self.b / self.g
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { g: 1.0, b: 1.0 }
    }
}

/// `λₘ = (2^{1-m} - 1) b`.
pub fn eigenvalue(m: usize, p: &ModelParams) -> f64 {
    (pow2(1 - clamp_index(m)) - 1.0) * p.b
}

fn clamp_index(m: usize) -> i32 {
    m.min(4096) as i32
}

fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

fn abs2(v: TwoFloat) -> f64 {
    v.hi().abs()
}

/// Sum of double-double values, largest magnitude first.
fn sum_sorted(mut parts: Vec<TwoFloat>) -> TwoFloat {
    parts.sort_by(|a, b| abs2(*b).partial_cmp(&abs2(*a)).unwrap_or(Ordering::Equal));
    parts
        .into_iter()
        .fold(TwoFloat::from(0.0), |acc, v| acc + v)
}

/// One term `c e^{-r x}` of an [`ExponentialSum`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    coeff: TwoFloat,
    rate: f64,
}

impl Term {
    pub fn coefficient(&self) -> f64 {
        self.coeff.hi()
    }

    /// Coefficient with its low-order compensation word.
    pub fn coefficient_compensated(&self) -> TwoFloat {
        self.coeff
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// Finite sum `x ↦ Σ cₙ e^{-rₙ x}` with strictly increasing positive rates.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentialSum {
    terms: Vec<Term>,
    truncation_tol: f64,
}

impl ExponentialSum {
    /// Builds a sum from `(coefficient, rate)` pairs. Terms are sorted by rate
    /// and equal rates are merged.
    pub fn new<I>(terms: I, truncation_tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        if !(truncation_tol > 0.0 && truncation_tol.is_finite()) {
            return Err(Error::InvalidTolerance(truncation_tol));
        }
        let mut out = Vec::new();
        for (c, r) in terms {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidRate(r));
            }
            out.push(Term {
                coeff: TwoFloat::from(c),
                rate: r,
            });
        }
        Ok(Self::from_terms(out, truncation_tol))
    }

    /// The empty sum.
    pub fn zero(truncation_tol: f64) -> Self {
        Self {
            terms: Vec::new(),
            truncation_tol,
        }
    }

    fn from_terms(mut terms: Vec<Term>, truncation_tol: f64) -> Self {
        terms.sort_by(|a, b| a.rate.partial_cmp(&b.rate).unwrap_or(Ordering::Equal));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if (t.rate - last.rate).abs() <= RATE_MERGE_RTOL * t.rate => {
                    last.coeff += t.coeff;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.hi() != 0.0 || t.coeff.lo() != 0.0);
        Self {
            terms: merged,
            truncation_tol,
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncation_tol(&self) -> f64 {
        self.truncation_tol
    }

    /// Evaluates the sum at `x ≥ 0`.
    ///
    /// Terms are accumulated in order of decreasing magnitude in double-double
    /// arithmetic, so the result is accurate relative to its own size rather
    /// than to the size of the largest term.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_compensated(x).hi()
    }

    pub(crate) fn eval_compensated(&self, x: f64) -> TwoFloat {
        let parts = self
            .terms
            .iter()
            .map(|t| t.coeff * (-t.rate * x).exp())
            .collect();
        sum_sorted(parts)
    }

    /// Term-wise derivative `(-cₙ rₙ, rₙ)`.
    pub fn derivative(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: -(t.coeff * t.rate),
                rate: t.rate,
            })
            .collect();
        Self::from_terms(terms, self.truncation_tol)
    }

    /// Represents `x ↦ s(factor · x)`.
    pub fn dilate(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidFactor(factor));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff,
                rate: t.rate * factor,
            })
            .collect();
        Ok(Self::from_terms(terms, self.truncation_tol))
    }

    pub fn scale(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff * factor,
                rate: t.rate,
            })
            .collect();
        Self::from_terms(terms, self.truncation_tol)
    }

    /// Sum of two exponential sums; the larger tolerance is kept.
    pub fn add(&self, other: &Self) -> Self {
        let terms = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .copied()
            .collect();
        Self::from_terms(terms, self.truncation_tol.max(other.truncation_tol))
    }

    /// `L s = -g s' - b s + 4 b s(2·)`, with equal rates merged.
    pub fn apply_operator(&self, p: &ModelParams) -> Self {
        let transport = self.derivative().scale(-p.g);
        let loss = self.scale(-p.b);
        let gain = self
            .dilate(2.0)
            .expect("factor 2 is a valid dilation")
            .scale(4.0 * p.b);
        transport.add(&loss).add(&gain)
    }

    /// `∫₀^∞ xⁿ s(x) dx = n! Σ cₖ / rₖ^{n+1}`.
    pub fn moment(&self, n: usize) -> f64 {
        self.moment_compensated(n).hi()
    }

    pub(crate) fn moment_compensated(&self, n: usize) -> TwoFloat {
        let power = n as i32 + 1;
        let parts = self
            .terms
            .iter()
            .map(|t| t.coeff / TwoFloat::from(t.rate).powi(power))
            .collect();
        sum_sorted(parts) * factorial(n)
    }
}

pub(crate) fn factorial(n: usize) -> TwoFloat {
    (2..=n).fold(TwoFloat::from(1.0), |acc, k| acc * k as f64)
}

/// The primal eigenfunction `fₘ` with leading coefficient 1, truncated at
/// relative tolerance `tol`.
///
/// The series stops at the first index `N` past the peak of `|cₙ|` (where the
/// coefficient ratio has dropped below 1/2) such that the first dropped
/// coefficient satisfies `2 |c_{N+1}| max(1, g r_{N+1} / b) ≤ tol`. The factor
/// 2 bounds the geometric tail and the rate factor bounds what the dropped
/// remainder contributes to `L fₘ - λₘ fₘ`.
pub fn primal_eigenfunction(m: usize, p: &ModelParams, tol: f64) -> Result<ExponentialSum> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    let mi = clamp_index(m);
    let scale = p.rate_scale();
    let rate = |n: usize| scale * pow2(n as i32 + 1 - mi);
    let growth = pow2(mi + 1);

    let mut coeff = TwoFloat::from(1.0);
    let mut terms = vec![Term {
        coeff,
        rate: rate(0),
    }];
    for n in 1..MAX_TERMS {
        let denom = pow2(n as i32) - 1.0;
        let next = coeff * (-growth) / denom;
        let ratio_after = growth / (pow2(n as i32 + 1) - 1.0);
        let weight = pow2(n as i32 + 1 - mi).max(1.0);
        if ratio_after < 0.5 && 2.0 * abs2(next) * weight <= tol {
            break;
        }
        terms.push(Term {
            coeff: next,
            rate: rate(n),
        });
        coeff = next;
    }
    Ok(ExponentialSum {
        terms,
        truncation_tol: tol,
    })
}

/// `f₀` rescaled to unit mass.
pub fn mass_normalized_f0(p: &ModelParams, tol: f64) -> Result<ExponentialSum> {
    let f0 = primal_eigenfunction(0, p, tol)?;
    let mass = f0.moment(0);
    Ok(f0.scale(1.0 / mass))
}

/// Dual eigenfunction `φₘ(x) = Σ αₙ xⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPolynomial {
    m: usize,
    coeffs: Vec<f64>,
}

impl DualPolynomial {
    /// Coefficients from the recurrence with `α₀ = 1`, before normalization.
    pub fn provisional(m: usize, p: &ModelParams) -> Self {
        let mut coeffs = Vec::with_capacity(m + 1);
        coeffs.push(1.0);
        let base = p.rate_scale() * pow2(1 - clamp_index(m));
        for n in 0..m {
            let factor = base * (1.0 - pow2(clamp_index(m) - n as i32)) / (n as f64 + 1.0);
            let next = coeffs[n] * factor;
            coeffs.push(next);
        }
        Self { m, coeffs }
    }

    pub fn index(&self) -> usize {
        self.m
    }

    /// `(α₀, …, αₘ)`, `αₙ` multiplying `xⁿ`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    pub fn apply_adjoint(&self, p: &ModelParams) -> Vec<f64> {
        apply_adjoint(&self.coeffs, p)
    }
}

/// Builds `φₘ` normalized so that `⟨φₘ, fₘ⟩ = 1`.
///
/// Lower moments of `fₘ` vanish, so the provisional pairing reduces to
/// `αₘ ∫ xᵐ fₘ`.
pub fn dual_eigenfunction(
    m: usize,
    p: &ModelParams,
    f_m: &ExponentialSum,
) -> Result<DualPolynomial> {
    let expected_rate = p.rate_scale() * pow2(1 - clamp_index(m));
    match f_m.terms().first() {
        Some(t) if (t.rate - expected_rate).abs() <= RATE_MERGE_RTOL * expected_rate => {}
        _ => return Err(Error::IndexMismatch { expected: m }),
    }
    let mut phi = DualPolynomial::provisional(m, p);
    let top = f_m.moment(m);
    let floor =
        f_m.truncation_tol() * factorial(m).hi() * (1.0 / p.rate_scale()).powi(m as i32 + 1);
    if top.is_nan() || top.abs() <= floor {
        return Err(Error::VanishingMoment { m, value: top });
    }
    let norm = 1.0 / (phi.coeffs[m] * top);
    for a in &mut phi.coeffs {
        *a *= norm;
    }
    Ok(phi)
}

/// Coefficients of `L* φ = g φ' - b φ + 2 b φ(x/2)` for `φ = Σ αⱼ xʲ`.
pub fn apply_adjoint(coeffs: &[f64], p: &ModelParams) -> Vec<f64> {
    (0..coeffs.len())
        .map(|j| {
            let drift = coeffs
                .get(j + 1)
                .map_or(0.0, |a| p.g * (j as f64 + 1.0) * a);
            drift + (2.0 * pow2(-(j as i32)) - 1.0) * p.b * coeffs[j]
        })
        .collect()
}

/// Largest `|L f(x) - λ f(x)| / max(1, |f(x)|)` over `points`.
pub fn eigen_residual(f: &ExponentialSum, lambda: f64, p: &ModelParams, points: &[f64]) -> f64 {
    let lf = f.apply_operator(p);
    points
        .iter()
        .map(|&x| {
            let fx = f.eval(x);
            (lf.eval(x) - lambda * fx).abs() / fx.abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Max-norm of `L* φ - λ φ` relative to the largest coefficient of `φ`.
pub fn adjoint_residual(phi: &DualPolynomial, lambda: f64, p: &ModelParams) -> f64 {
    let scale = phi.coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    phi.apply_adjoint(p)
        .iter()
        .zip(&phi.coeffs)
        .map(|(l, c)| (l - lambda * c).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Exact pairing `⟨φ, s⟩ = Σⱼ αⱼ ∫ xʲ s(x) dx`.
pub fn pairing(phi: &DualPolynomial, s: &ExponentialSum) -> f64 {
    let parts = phi
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, &a)| s.moment_compensated(j) * a)
        .collect();
    sum_sorted(parts).hi()
}
