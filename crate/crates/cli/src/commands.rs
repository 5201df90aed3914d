use std::fs;
use std::path::PathBuf;

use log::warn;
use mitosis_core::{
    adjoint_residual, eigen_residual, log_spaced, make_grid, pairing, residual_series, solve,
    spectrum_table, total_mass, trapezoid, Eigenbasis, SolverConfig,
};

use crate::config::{CommandName, RunConfig};
use crate::output::{fmt_list, fmt_real, CsvTable};
use crate::svg::{Plot, Series};
use crate::CliError;

/// Points of the log-spaced sample used for eigen-residuals, on
/// `[1e-3 g/b, 20 g/b]`.
pub const RESIDUAL_SAMPLE_POINTS: usize = 200;

pub fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(&cfg.out_dir)?;
    match cfg.command {
        CommandName::Eigen => cmd_eigen(cfg),
        CommandName::Simulate => cmd_simulate(cfg),
        CommandName::Expansion => cmd_expansion(cfg),
        CommandName::Spectrum => cmd_spectrum(cfg),
    }
}

pub fn residual_sample(cfg: &RunConfig) -> Vec<f64> {
    let length = cfg.params.g() / cfg.params.b();
    log_spaced(1e-3 * length, 20.0 * length, RESIDUAL_SAMPLE_POINTS)
}

pub fn cmd_eigen(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let p = cfg.params;
    let basis = Eigenbasis::new(p, cfg.order, cfg.tol)?;
    let indices = 0..=cfg.order;
    let mut written = Vec::new();

    let mut table = CsvTable::new(
        cfg,
        &[
            "m",
            "lambda",
            "n_terms",
            "series_coefficients",
            "series_rates",
            "phi_coefficients",
        ],
    );
    for m in indices.clone() {
        let f = basis.primal(m);
        let coeffs: Vec<f64> = f.terms().iter().map(|t| t.coefficient()).collect();
        let rates: Vec<f64> = f.terms().iter().map(|t| t.rate()).collect();
        table.row(&[
            m.to_string(),
            fmt_real(basis.eigenvalue(m)),
            f.len().to_string(),
            fmt_list(&coeffs),
            fmt_list(&rates),
            fmt_list(basis.dual(m).coeffs()),
        ]);
    }
    written.push(table.write(&cfg.out_dir, "eigen_table.csv")?);

    let mut header = vec!["n".to_string()];
    header.extend(indices.clone().map(|m| format!("f_{m}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut bio = CsvTable::new(cfg, &header_refs);
    for n in indices.clone() {
        let mut row = vec![n.to_string()];
        row.extend(
            indices
                .clone()
                .map(|m| fmt_real(pairing(basis.dual(n), basis.primal(m)))),
        );
        bio.row(&row);
    }
    written.push(bio.write(&cfg.out_dir, "biorthogonality.csv")?);

    let points = residual_sample(cfg);
    let mut res = CsvTable::new(
        cfg,
        &[
            "m",
            "lambda",
            "eigen_residual_sup",
            "boundary_value",
            "adjoint_residual",
        ],
    );
    for m in indices.clone() {
        let lambda = basis.eigenvalue(m);
        res.row(&[
            m.to_string(),
            fmt_real(lambda),
            fmt_real(eigen_residual(basis.primal(m), lambda, &p, &points)),
            fmt_real(basis.primal(m).eval(0.0)),
            fmt_real(adjoint_residual(basis.dual(m), lambda, &p)),
        ]);
    }
    written.push(res.write(&cfg.out_dir, "residuals.csv")?);

    let length = p.g() / p.b();
    let xs: Vec<f64> = (0..=400)
        .map(|i| 10.0 * length * i as f64 / 400.0)
        .collect();
    let series = (0..=cfg.order.min(4))
        .map(|m| {
            let f = basis.primal(m);
            let ys: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
            let peak = ys
                .iter()
                .fold(0.0f64, |a, y| a.max(y.abs()))
                .max(f64::MIN_POSITIVE);
            Series::line(
                format!("f_{m} / max|f_{m}|"),
                xs.iter().zip(&ys).map(|(&x, &y)| (x, y / peak)).collect(),
            )
        })
        .collect();
    let plot = Plot {
        title: "Primal eigenfunctions".into(),
        x_label: "size x".into(),
        y_label: "normalized f_m(x)".into(),
        log_y: false,
        series,
    };
    let path = cfg.out_dir.join("eigenfunctions.svg");
    fs::write(&path, plot.render())?;
    written.push(path);
    Ok(written)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let p = cfg.params;
    let grid = make_grid(cfg.x_max, cfg.n_cells)?;
    let u0 = cfg.ic.build(&grid, &p, cfg.tol)?;
    let solver = SolverConfig::new(grid.clone(), p, cfg.times.clone())?;
    let snapshots = solve(&u0, &solver)?;
    let mass0 = total_mass(&u0);

    let mut snaps = CsvTable::new(cfg, &["t", "x", "u"]);
    let mut mass = CsvTable::new(cfg, &["t", "total_mass", "expected_mass", "relative_error"]);
    let half = grid.n_cells() / 2;
    for s in &snapshots {
        let t = fmt_real(s.time);
        for (x, u) in grid.nodes().zip(s.u.values()) {
            snaps.row(&[t.clone(), fmt_real(x), fmt_real(*u)]);
        }
        let m = total_mass(&s.u);
        let expected = (p.b() * s.time).exp() * mass0;
        mass.row(&[
            t,
            fmt_real(m),
            fmt_real(expected),
            fmt_real((m - expected).abs() / expected.abs()),
        ]);
        let upper = trapezoid(&s.u.values()[half..], grid.h());
        if upper.abs() > 1e-8 * m.abs() {
            warn!(
                "t = {}: mass in [x_max/2, x_max] is {:.3e} of total; the gain term is truncated there",
                s.time,
                upper / m
            );
        }
    }
    Ok(vec![
        snaps.write(&cfg.out_dir, "snapshots.csv")?,
        mass.write(&cfg.out_dir, "mass.csv")?,
    ])
}

pub fn cmd_expansion(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let p = cfg.params;
    let grid = make_grid(cfg.x_max, cfg.n_cells)?;
    let u0 = cfg.ic.build(&grid, &p, cfg.tol)?;
    let basis = Eigenbasis::new(p, cfg.order + 1, cfg.tol)?;
    let solver = SolverConfig::new(grid, p, cfg.times.clone())?;
    let report = residual_series(&basis, &u0, cfg.order, cfg.k, &solver, cfg.window)?;
    if report.inconclusive {
        warn!(
            "alpha_{} = {:e} is negligible; the fitted rate need not approach lambda_{}",
            cfg.order + 1,
            report.next_coefficient,
            cfg.order + 1
        );
    }

    let mut summary = CsvTable::new(
        cfg,
        &[
            "M",
            "coefficients",
            "next_coefficient",
            "k",
            "fitted_rate",
            "target_rate",
            "rescaled_fitted_rate",
            "floor_estimate",
            "window_start",
            "window_end",
            "status",
        ],
    );
    summary.row(&[
        report.order.to_string(),
        fmt_list(&report.coefficients),
        fmt_real(report.next_coefficient),
        fmt_real(report.k),
        fmt_real(report.fitted_rate),
        fmt_real(report.target_rate),
        fmt_real(report.rescaled_fitted_rate(&p)),
        fmt_real(report.floor_estimate),
        fmt_real(report.window.start),
        fmt_real(report.window.end),
        if report.inconclusive {
            "inconclusive"
        } else {
            "ok"
        }
        .to_string(),
    ]);

    let mut series = CsvTable::new(cfg, &["t", "residual", "floor_residual"]);
    for ((t, r), (_, fl)) in report.residuals.iter().zip(&report.floor_residuals) {
        series.row(&[fmt_real(*t), fmt_real(*r), fmt_real(*fl)]);
    }

    let mut written = vec![
        summary.write(&cfg.out_dir, "expansion.csv")?,
        series.write(&cfg.out_dir, "residual_series.csv")?,
    ];

    // Fitted and target lines pass through the residual at the window midpoint.
    let mid = 0.5 * (report.window.start + report.window.end);
    let anchor = report
        .residuals
        .iter()
        .min_by(|a, b| (a.0 - mid).abs().total_cmp(&(b.0 - mid).abs()))
        .copied()
        .unwrap_or((mid, 1.0));
    let line = |rate: f64| -> Vec<(f64, f64)> {
        report
            .residuals
            .iter()
            .map(|&(t, _)| (t, anchor.1 * (rate * (t - anchor.0)).exp()))
            .collect()
    };
    let fitted = Series::line(
        format!("fit {:.4}", report.fitted_rate),
        line(report.fitted_rate),
    );
    let mut target = Series::line(
        format!("lambda_{} = {:.4}", cfg.order + 1, report.target_rate),
        line(report.target_rate),
    );
    target.dashed = true;
    let mut points = Series::line(format!("r_{}(t)", cfg.order), report.residuals.clone());
    points.markers = true;
    let mut floor = Series::line("floor", report.floor_residuals.clone());
    floor.dashed = true;
    let plot = Plot {
        title: format!("Expansion residual, M = {}, k = {}", cfg.order, cfg.k),
        x_label: "time t".into(),
        y_label: "weighted L1 residual".into(),
        log_y: true,
        series: vec![points, fitted, target, floor],
    };
    let path = cfg.out_dir.join("residual_decay.svg");
    fs::write(&path, plot.render())?;
    written.push(path);
    Ok(written)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let rows = spectrum_table(&cfg.a_values, &cfg.params)?;
    let mut table = CsvTable::new(cfg, &["a", "k_a", "m_a", "dominant_eigenvalues"]);
    for r in &rows {
        table.row(&[
            fmt_real(r.a),
            fmt_real(r.k_a),
            r.m_a.to_string(),
            fmt_list(&r.dominant_eigenvalues),
        ]);
    }
    Ok(vec![table.write(&cfg.out_dir, "spectrum.csv")?])
}
