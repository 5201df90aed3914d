use mitosis_core::{
    eigenvalue, expansion_coefficients, make_grid, residual_series, sample, Eigenbasis, FitWindow,
    Grid, GridFunction, ModelParams, SolverConfig, DEFAULT_TOL,
};

fn gaussian_on(grid: &Grid) -> GridFunction {
    sample(|x: f64| (-(x - 5.0) * (x - 5.0) / 2.0).exp(), grid)
}

fn times(step: f64, end: f64) -> Vec<f64> {
    (0..=(end / step).round() as usize)
        .map(|i| i as f64 * step)
        .collect()
}

#[test]
#[allow(clippy::needless_range_loop)]
fn coefficients_converge_at_second_order() {
    let p = ModelParams::default();
    let basis = Eigenbasis::new(p, 3, DEFAULT_TOL).unwrap();
    let coeffs: Vec<Vec<f64>> = [1500usize, 3000, 6000, 12000]
        .iter()
        .map(|&n| {
            let grid = make_grid(30.0, n).unwrap();
            expansion_coefficients(&basis, &gaussian_on(&grid), 3).unwrap()
        })
        .collect();
    for m in 0..=3 {
        let d1 = (coeffs[1][m] - coeffs[0][m]).abs();
        let d2 = (coeffs[2][m] - coeffs[1][m]).abs();
        let d3 = (coeffs[3][m] - coeffs[2][m]).abs();
        let scale = coeffs[3][m].abs();
        assert!(d3 <= 1e-5 * scale.max(1.0), "m = {m}: {d3}");
        if d2 > 1e-12 * scale {
            assert!(d1 / d2 > 3.0 && d2 / d3 > 3.0, "m = {m}: {d1} {d2} {d3}");
        }
    }
}

#[test]
fn higher_order_leaves_smaller_residual() {
    let p = ModelParams::default();
    let grid = make_grid(30.0, 6000).unwrap();
    let cfg = SolverConfig::new(grid.clone(), p, times(0.25, 3.0)).unwrap();
    let basis = Eigenbasis::new(p, 3, DEFAULT_TOL).unwrap();
    let u0 = gaussian_on(&grid);
    let window = FitWindow::default_for(&p);
    let r0 = residual_series(&basis, &u0, 0, 3.0, &cfg, window).unwrap();
    let r1 = residual_series(&basis, &u0, 1, 3.0, &cfg, window).unwrap();
    let r2 = residual_series(&basis, &u0, 2, 3.0, &cfg, window).unwrap();
    for ((a, b), c) in r0.residuals.iter().zip(&r1.residuals).zip(&r2.residuals) {
        if a.0 >= window.start {
            assert!(b.1 < a.1, "t = {}", a.0);
        }
        if a.0 >= window.end {
            assert!(c.1 < b.1, "t = {}", a.0);
        }
    }
}

#[test]
fn rescaled_order_zero_residual_never_grows() {
    let p = ModelParams::default();
    let grid = make_grid(30.0, 6000).unwrap();
    let cfg = SolverConfig::new(grid.clone(), p, times(0.1, 4.0)).unwrap();
    let basis = Eigenbasis::new(p, 1, DEFAULT_TOL).unwrap();
    let report = residual_series(
        &basis,
        &gaussian_on(&grid),
        0,
        2.0,
        &cfg,
        FitWindow::default_for(&p),
    )
    .unwrap();
    let rescaled: Vec<f64> = report
        .residuals
        .iter()
        .map(|(t, r)| r * (-eigenvalue(0, &p) * t).exp())
        .collect();
    assert!(!report.inconclusive);
    for w in rescaled.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-9), "{w:?}");
    }
}

#[test]
fn exact_mode_mixture_sits_at_the_floor() {
    let p = ModelParams::default();
    let grid = make_grid(30.0, 6000).unwrap();
    let cfg = SolverConfig::new(grid.clone(), p, times(0.25, 3.0)).unwrap();
    let basis = Eigenbasis::new(p, 3, DEFAULT_TOL).unwrap();
    let u0 = basis
        .mode_sum(&[1.0, 0.5, 0.25], 0.0, &GridFunction::zeros(&grid))
        .unwrap();
    let report = residual_series(&basis, &u0, 2, 3.0, &cfg, FitWindow::default_for(&p)).unwrap();
    assert!(report.next_coefficient.abs() <= 1e-4);
    assert!(report.inconclusive);
    let start = report.residuals[0].1;
    for ((_, r), (_, f)) in report.residuals.iter().zip(&report.floor_residuals) {
        assert!(*r <= f + 2.0 * start, "{r} vs floor {f}");
    }
}
