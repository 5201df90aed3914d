use approx::assert_relative_eq;
use mitosis_core::{
    adjoint_residual, dual_eigenfunction, eigen_residual, eigenvalue, log_spaced, pairing,
    primal_eigenfunction, DualPolynomial, ExponentialSum, ModelParams, DEFAULT_TOL,
};
use proptest::prelude::*;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn basis(p: &ModelParams, max: usize) -> Vec<(ExponentialSum, DualPolynomial)> {
    (0..=max)
        .map(|m| {
            let f = primal_eigenfunction(m, p, DEFAULT_TOL).unwrap();
            let phi = dual_eigenfunction(m, p, &f).unwrap();
            (f, phi)
        })
        .collect()
}

#[test]
fn biorthogonality_six_by_six() {
    for p in [
        ModelParams::default(),
        ModelParams::new(0.7, 2.3).unwrap(),
        ModelParams::new(3.0, 0.4).unwrap(),
    ] {
        let pairs = basis(&p, 5);
        for (n, (_, phi)) in pairs.iter().enumerate() {
            for (m, (f, _)) in pairs.iter().enumerate() {
                let expected = if n == m { 1.0 } else { 0.0 };
                let got = pairing(phi, f);
                assert!(
                    (got - expected).abs() <= 1e-8,
                    "<phi_{n}, f_{m}> = {got} for {p:?}"
                );
            }
        }
    }
}

#[test]
fn eigen_identities_on_log_sample() {
    let p = ModelParams::default();
    let points = log_spaced(1e-3, 20.0, 200);
    for m in 0..=6 {
        let f = primal_eigenfunction(m, &p, DEFAULT_TOL).unwrap();
        let lambda = eigenvalue(m, &p);
        assert!(eigen_residual(&f, lambda, &p, &points) <= 1e-10, "m = {m}");
        assert!(f.eval(0.0).abs() <= 1e-10, "m = {m}");
    }
    for m in 0..=8 {
        let f = primal_eigenfunction(m, &p, DEFAULT_TOL).unwrap();
        let phi = dual_eigenfunction(m, &p, &f).unwrap();
        assert!(adjoint_residual(&phi, eigenvalue(m, &p), &p) <= 1e-12);
    }
}

#[test]
fn vanishing_lower_moments() {
    let p = ModelParams::default();
    for m in 1..=6 {
        let f = primal_eigenfunction(m, &p, DEFAULT_TOL).unwrap();
        for n in 0..m {
            assert!(
                f.moment(n).abs() <= 1e-10 * factorial(n),
                "m = {m}, n = {n}: {}",
                f.moment(n)
            );
        }
        assert!(f.moment(m).abs() > 1e-10 * factorial(m));
    }
}

#[test]
fn primal_series_leading_terms() {
    let p = ModelParams::default();
    let f0 = primal_eigenfunction(0, &p, DEFAULT_TOL).unwrap();
    let t = f0.terms();
    assert_relative_eq!(t[0].coefficient(), 1.0);
    assert_relative_eq!(t[0].rate(), 2.0);
    assert_relative_eq!(t[1].coefficient(), -2.0);
    assert_relative_eq!(t[1].rate(), 4.0);
    assert_relative_eq!(t[2].coefficient(), 4.0 / 3.0);
    assert_relative_eq!(t[2].rate(), 8.0);
}

#[test]
fn dual_of_f0_is_constant() {
    let p = ModelParams::new(1.7, 0.6).unwrap();
    let (f0, phi0) = basis(&p, 0).remove(0);
    assert_eq!(phi0.coeffs().len(), 1);
    assert_relative_eq!(phi0.coeffs()[0] * f0.moment(0), 1.0, max_relative = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilation_is_invertible(
        c in prop::collection::vec(-5.0f64..5.0, 1..6),
        factor in 0.25f64..4.0,
        x in 0.0f64..10.0,
    ) {
        let terms = c.iter().enumerate().map(|(i, &ci)| (ci, 0.5 + i as f64));
        let s = ExponentialSum::new(terms, DEFAULT_TOL).unwrap();
        let back = s.dilate(factor).unwrap().dilate(1.0 / factor).unwrap();
        let scale = c.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        prop_assert!((back.eval(x) - s.eval(x)).abs() <= 1e-12 * scale);
        prop_assert!((s.dilate(factor).unwrap().eval(x) - s.eval(factor * x)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn pairing_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, n in 0usize..5) {
        let p = ModelParams::default();
        let pairs = basis(&p, 4);
        let (f1, _) = &pairs[1];
        let (f3, _) = &pairs[3];
        let phi = &pairs[n].1;
        let combo = f1.scale(a).add(&f3.scale(b));
        let lhs = pairing(phi, &combo);
        let rhs = a * pairing(phi, f1) + b * pairing(phi, f3);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn eigen_identities_for_general_params(g in 0.2f64..5.0, b in 0.2f64..5.0, m in 0usize..5) {
        let p = ModelParams::new(g, b).unwrap();
        let f = primal_eigenfunction(m, &p, DEFAULT_TOL).unwrap();
        let lambda = eigenvalue(m, &p);
        let points = log_spaced(1e-3 * g / b, 20.0 * g / b, 50);
        prop_assert!(eigen_residual(&f, lambda, &p, &points) <= 1e-10);
        let phi = dual_eigenfunction(m, &p, &f).unwrap();
        prop_assert!(adjoint_residual(&phi, lambda, &p) <= 1e-12);
        prop_assert!((pairing(&phi, &f) - 1.0).abs() <= 1e-8);
    }
}
