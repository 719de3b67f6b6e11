//! Per-task computations. Every task maps a sweep point to one CSV row and a
//! few comparison rows.

use faer::c64;
use rayon::prelude::*;

use super::config::{Scenario, Task};
use super::report::{ComparisonRow, Table};
use crate::analytic::{
    characteristic_time, critical_lambda, delta2_g, lambda_sensor, moment_gb0, moment_ss, qfi_gb0_kappa,
    Observable, Regime, Relaxation, Variant,
};
use crate::dynamics::{
    build_full_model, build_reduced_model, lossless_signal_dim, lossless_signal_steady_state, spectral_gap_converged,
    steady_state, three_level_steady, SteadyStateResult, SteadyTolerances, SystemParams,
};
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, expectation, DensityMatrix, FockSpace};
use crate::meanfield::{
    build_w, delta2_g_normal, delta2_g_normal_lyapunov, fluct_moments_analytic, fluct_moments_lyapunov,
    steady_solutions,
};
use crate::metrology::{
    error_propagation, gaussian_derivative, photon_stats, qfi_gaussian, qfi_spectral, GaussianMoments,
};
use crate::ode::Tolerances;

const FIG2_GRID: [f64; 5] = [0.02, 0.05, 0.1, 0.2, 0.5];
const NAN: f64 = f64::NAN;

type PointOutput = (Vec<f64>, Vec<ComparisonRow>);

pub fn run_task(task: Task, sc: &Scenario) -> Result<(Table, Vec<ComparisonRow>)> {
    match task {
        Task::SteadyMoments => sweep(sc, steady_moments_columns(sc), steady_moments),
        Task::Qfi => sweep(sc, QFI_COLUMNS.to_vec(), qfi),
        Task::Uncertainty => sweep(sc, UNCERTAINTY_COLUMNS.to_vec(), uncertainty),
        Task::Meanfield => sweep(sc, MEANFIELD_COLUMNS.to_vec(), meanfield),
        Task::Gap => sweep(sc, GAP_COLUMNS.to_vec(), gap),
        Task::Fig2 => fig2(sc),
        Task::Sensor => sensor(sc),
    }
}

fn sweep<F>(sc: &Scenario, columns: Vec<&str>, point: F) -> Result<(Table, Vec<ComparisonRow>)>
where
    F: Fn(&Scenario, f64, &SystemParams) -> Result<PointOutput> + Sync,
{
    let pts = sc.points()?;
    let outputs = pts.par_iter().map(|(v, p)| point(sc, *v, p)).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&columns);
    let mut rows = Vec::new();
    for (cells, cmp) in outputs {
        table.push(cells);
        rows.extend(cmp);
    }
    Ok((table, rows))
}

fn label(sc: &Scenario, what: &str, v: f64) -> String {
    format!("{what}[{}={v}]", sc.sweep_param())
}

fn steady_tol(sc: &Scenario) -> SteadyTolerances {
    let t = &sc.tolerances;
    SteadyTolerances { residual: t.residual, integrator: Tolerances { rtol: t.rtol, atol: t.atol }, ..Default::default() }
}

fn mean_number(rho: &DensityMatrix) -> f64 {
    (0..rho.dim()).map(|k| k as f64 * rho.population(k)).sum()
}

/// Reduced-model steady state, raising the signal dimension until the top
/// level is empty enough. Without single-photon loss the coherent branch is
/// selected.
fn reduced_steady(sc: &Scenario, p: &SystemParams) -> Result<SteadyStateResult> {
    let tr = &sc.truncation;
    let limit = sc.tolerances.top_population;
    let mut d = tr.signal;
    if p.gamma_b == 0.0 {
        d = d.max(lossless_signal_dim(p, 1e-20)?);
    }
    loop {
        let r = solve_reduced(sc, p, d)?;
        let top = r.rho.population(d - 1);
        if !tr.auto_raise || top < limit {
            return Ok(r);
        }
        if d >= tr.max_signal {
            return Err(Error::InsufficientTruncation { dim: d, deficit: top, limit });
        }
        d = (d + 10).min(tr.max_signal);
    }
}

fn solve_reduced(sc: &Scenario, p: &SystemParams, d: usize) -> Result<SteadyStateResult> {
    if p.gamma_b == 0.0 {
        lossless_signal_steady_state(p, d, steady_tol(sc))
    } else {
        steady_state(&build_reduced_model(p, d)?, steady_tol(sc))
    }
}

fn steady_moments_columns(sc: &Scenario) -> Vec<&'static str> {
    let mut c = vec!["value", "signal_dim", "residual", "n_numeric", "n_series", "b2_re_numeric", "b2_im_numeric", "b2_re_series", "b2_im_series", "max_abs_dev"];
    if sc.truncation.full_model {
        c.push("n_full_model");
    }
    c
}

fn steady_moments(sc: &Scenario, v: f64, p: &SystemParams) -> Result<PointOutput> {
    let r = reduced_steady(sc, p)?;
    let d = r.rho.dim();
    let b = annihilation(FockSpace::new(d)?);
    // The series describe a zero-temperature bath only.
    let has_series = p.gamma_b == 0.0 || p.nbar == 0.0;
    let series = |l: u32, k: u32| {
        if !has_series {
            Ok(c64::new(NAN, NAN))
        } else if p.gamma_b == 0.0 {
            moment_gb0(l, k, p)
        } else {
            moment_ss(l, k, p, 1e-16)
        }
    };
    let mut worst = 0.0f64;
    for l in 0..=2 {
        for k in 0..=2 {
            let op = b.adjoint().pow(l).mul(&b.pow(k));
            worst = worst.max((expectation(&op, &r.rho)? - series(l, k)?).norm());
        }
    }
    if !has_series {
        worst = NAN;
    }
    let n_num = mean_number(&r.rho);
    let b2_num = expectation(&b.mul(&b), &r.rho)?;
    let n_ser = series(1, 1)?.re;
    let b2_ser = series(0, 2)?;
    let mut cells = vec![v, d as f64, r.residual, n_num, n_ser, b2_num.re, b2_num.im, b2_ser.re, b2_ser.im, worst];
    let mut rows = Vec::new();
    if has_series {
        rows.push(ComparisonRow::absolute(label(sc, "max |moment dev|", v), 0.0, worst, sc.tolerances.moments));
    }
    if sc.truncation.full_model {
        let full = steady_state(&build_full_model(p, sc.truncation.pump, d)?, steady_tol(sc))?;
        let pops = full.rho.mode_populations(1);
        let n_full: f64 = pops.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
        cells.push(n_full);
        rows.push(ComparisonRow::new(label(sc, "N_b full vs reduced", v), n_num, n_full, None));
    }
    Ok((cells, rows))
}

const QFI_COLUMNS: [&str; 8] =
    ["value", "signal_dim", "qfi_gaussian", "qfi_spectral", "qfi_closed", "delta2_photon", "photon_times_qfi", "inv_qfi_bound_ok"];

fn qfi(sc: &Scenario, v: f64, p: &SystemParams) -> Result<PointOutput> {
    let tol = &sc.tolerances;
    let step = tol.fd_step * p.g.abs().max(1.0);
    let base = reduced_steady(sc, p)?;
    let d = base.rho.dim();
    let family = |g: f64| -> Result<DensityMatrix> { Ok(solve_reduced(sc, &SystemParams { g, ..*p }, d)?.rho) };

    let spectral = qfi_spectral(family, p.g, step, tol.eigen_floor)?.value;
    let photon = error_propagation(&photon_stats(family, p.g, step, 0)?)?;
    let mut rows = Vec::new();
    let (gauss, closed) = if p.gamma_b == 0.0 {
        let m = GaussianMoments::of_mode(&base.rho, 0)?;
        let dm = gaussian_derivative(|g| GaussianMoments::of_mode(&family(g)?, 0), p.g, step)?;
        let gauss = qfi_gaussian(&m, &dm)?.value;
        let closed = qfi_gb0_kappa(p);
        rows.push(ComparisonRow::new(label(sc, "F gaussian vs closed", v), closed, gauss, Some(tol.qfi)));
        rows.push(ComparisonRow::new(label(sc, "F spectral vs gaussian", v), gauss, spectral, Some(tol.qfi)));
        rows.push(ComparisonRow::new(label(sc, "photon d2g * F", v), 1.0, photon * gauss, Some(tol.qfi)));
        (gauss, closed)
    } else {
        (NAN, NAN)
    };
    let bound_ok = photon >= (1.0 - 1e-3) / spectral;
    rows.push(ComparisonRow::check(label(sc, "photon d2g >= 1/F", v), bound_ok));
    let cells = vec![v, d as f64, gauss, spectral, closed, photon, photon * spectral, if bound_ok { 1.0 } else { 0.0 }];
    Ok((cells, rows))
}

const UNCERTAINTY_COLUMNS: [&str; 17] = [
    "value",
    "gb0_photon",
    "gb0_homodyne_phi0",
    "gb0_qcrb",
    "gb0_kappa_photon",
    "gb0_kappa_qcrb",
    "three_level_photon_printed",
    "three_level_homodyne_printed",
    "three_level_qcrb_printed",
    "three_level_photon_rederived",
    "three_level_homodyne_rederived",
    "three_level_qcrb_rederived",
    "thermal_printed",
    "thermal_rederived",
    "critical_printed",
    "critical_rederived",
    "inv_gaussian_qfi",
];

fn uncertainty(sc: &Scenario, v: f64, p: &SystemParams) -> Result<PointOutput> {
    let eval = |r: Regime, o: Observable, var: Variant| delta2_g(r, o, p, var).map_or(NAN, |u| u.delta2);
    let (pr, rd) = (Variant::Printed, Variant::Rederived);
    let (ph, qc, hom) = (Observable::Photon, Observable::Qcrb, Observable::Homodyne { phi: 0.0 });
    let mut cells = vec![
        v,
        eval(Regime::Gb0, ph, pr),
        eval(Regime::Gb0, hom, pr),
        eval(Regime::Gb0, qc, pr),
        eval(Regime::Gb0Kappa, ph, pr),
        eval(Regime::Gb0Kappa, qc, pr),
    ];
    for var in [pr, rd] {
        cells.extend([eval(Regime::ThreeLevel, ph, var), eval(Regime::ThreeLevel, hom, var), eval(Regime::ThreeLevel, qc, var)]);
    }
    cells.extend([
        eval(Regime::Thermal, ph, pr),
        eval(Regime::Thermal, ph, rd),
        eval(Regime::Critical, ph, pr),
        eval(Regime::Critical, ph, rd),
    ]);

    let mut rows = Vec::new();
    let inv_f = if p.gamma_b == 0.0 && p.g > 0.0 && p.lambda_a > 0.0 { 1.0 / qfi_gb0_kappa(p) } else { NAN };
    cells.push(inv_f);
    if cells[4].is_finite() && inv_f.is_finite() {
        rows.push(ComparisonRow::new(label(sc, "photon d2g vs 1/F gaussian", v), cells[4], inv_f, Some(sc.tolerances.identity)));
    }
    if cells[6].is_finite() {
        let ordered = cells[8] <= cells[6] && cells[6] <= cells[7];
        rows.push(ComparisonRow::check(label(sc, "three-level qcrb <= photon <= homodyne", v), ordered));
    }
    if cells[12].is_finite() && p.nbar == 0.0 {
        rows.push(ComparisonRow::new(label(sc, "thermal printed vs rederived at nbar=0", v), cells[13], cells[12], Some(sc.tolerances.identity)));
    }
    Ok((cells, rows))
}

const MEANFIELD_COLUMNS: [&str; 12] = [
    "value",
    "lambda_c",
    "n_branches",
    "normal_stable",
    "superradiant_stable",
    "max_residual",
    "n_fluct_analytic",
    "n_fluct_lyapunov",
    "delta2_printed",
    "delta2_rederived",
    "delta2_lyapunov",
    "nbar",
];

fn meanfield(sc: &Scenario, v: f64, p: &SystemParams) -> Result<PointOutput> {
    let tol = &sc.tolerances;
    let sols = steady_solutions(p)?;
    let reports = sols.iter().map(|s| build_w(p, s)).collect::<Result<Vec<_>>>()?;
    let residual = sols.iter().map(|s| s.residual(p)).fold(0.0, f64::max);
    let lc = critical_lambda(p).unwrap_or(f64::INFINITY);
    let normal_stable = reports[0].stable;
    let sr_stable = if reports.len() > 1 { reports[1..].iter().all(|r| r.stable) as u8 as f64 } else { NAN };

    let above = p.lambda_a > lc;
    let consistent = (sols.len() > 1) == above && normal_stable != above;
    let mut rows = vec![
        ComparisonRow::check(label(sc, "branches <=> lambda_a > lambda_c <=> normal unstable", v), consistent || reports[0].marginal),
        ComparisonRow::absolute(label(sc, "mean-field residual", v), 0.0, residual, 1e-10),
    ];

    let mut tail = [NAN; 5];
    if normal_stable && p.gamma_b > 0.0 {
        let an = fluct_moments_analytic(p, p.nbar, Variant::Rederived)?;
        let ly = fluct_moments_lyapunov(&reports[0], p, p.nbar)?;
        rows.push(ComparisonRow::new(label(sc, "n_fluct analytic vs lyapunov", v), an.n_fluct, ly.n_fluct, Some(tol.lyapunov)));
        let printed = delta2_g_normal(p, p.nbar, Variant::Printed)?.delta2;
        let rederived = delta2_g_normal(p, p.nbar, Variant::Rederived)?.delta2;
        let numeric = delta2_g_normal_lyapunov(p, p.nbar, tol.fd_step * p.g.abs().max(1e-3))?;
        rows.push(ComparisonRow::new(label(sc, "d2g rederived vs lyapunov", v), rederived, numeric, Some(tol.qfi)));
        rows.push(ComparisonRow::new(label(sc, "d2g printed vs rederived", v), rederived, printed, None));
        tail = [an.n_fluct, ly.n_fluct, printed, rederived, numeric];
    }
    let mut cells = vec![v, lc, sols.len() as f64, normal_stable as u8 as f64, sr_stable, residual];
    cells.extend(tail);
    cells.push(p.nbar);
    Ok((cells, rows))
}

const GAP_COLUMNS: [&str; 5] = ["value", "signal_dim", "gap", "tau_closed", "gap_times_tau"];

fn gap(sc: &Scenario, v: f64, p: &SystemParams) -> Result<PointOutput> {
    let mut d = sc.truncation.signal;
    if p.gamma_b == 0.0 {
        d = d.max(lossless_signal_dim(p, 1e-20)?);
    }
    let gap = spectral_gap_converged(|d| build_reduced_model(p, d), d, 10)?;
    let regime = if p.gamma_b == 0.0 { Relaxation::TwoPhoton } else { Relaxation::SinglePhoton };
    let tau = characteristic_time(p, regime).unwrap_or(NAN);
    let rows = vec![ComparisonRow::new(label(sc, "gap * tau", v), 1.0, gap * tau, None)];
    Ok((vec![v, (d + 10) as f64, gap, tau, gap * tau], rows))
}

fn fig2(sc: &Scenario) -> Result<(Table, Vec<ComparisonRow>)> {
    let mut sc = sc.clone();
    if sc.sweep.is_none() {
        sc.sweep = Some(super::config::Sweep { param: "g".into(), values: FIG2_GRID.to_vec() });
    }
    let sc = &sc;
    let (table, _) = sweep(sc, vec!["g", "Nb_three_level", "Nb_exact", "rel_dev"], |sc, _, p| {
        let tl = three_level_steady(p)?.photon_number();
        let exact = mean_number(&reduced_steady(sc, p)?.rho);
        Ok((vec![p.g, tl, exact, (tl - exact).abs() / exact.abs().max(f64::MIN_POSITIVE)], vec![]))
    })?;
    let mut rows: Vec<ComparisonRow> = table
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let tol = (i == 0).then_some(sc.tolerances.fig2);
            ComparisonRow::new(format!("N_b three-level vs exact[g={}]", r[0]), r[2], r[1], tol)
        })
        .collect();
    if sc.sweep_param() == "g" && table.rows.len() > 1 {
        let decreasing = table.rows.windows(2).all(|w| w[0][3] < w[1][3]);
        rows.push(ComparisonRow::check("fig2 rel_dev strictly decreasing as g decreases", decreasing));
    }
    Ok((table, rows))
}

fn sensor(sc: &Scenario) -> Result<(Table, Vec<ComparisonRow>)> {
    let (table, mut rows) = sweep(sc, vec!["value", "g", "delta2_lambda", "n_b", "delta2_lambda_times_nb"], |sc, v, p| {
        let r = lambda_sensor(p)?;
        let row = ComparisonRow::new(label(sc, "d2lambda * N_b vs lambda_a^2", v), p.lambda_a * p.lambda_a, r.delta2_lambda_times_nb, Some(sc.tolerances.identity));
        Ok((vec![v, p.g, r.delta2_lambda, r.n_b, r.delta2_lambda_times_nb], vec![row]))
    })?;
    if let Some(opt) = lambda_sensor(&SystemParams { g: sc.params.g.abs().max(f64::MIN_POSITIVE), ..sc.params })?.optimum {
        rows.push(ComparisonRow::new("sensor argmin g", opt.g_closed, opt.g_numeric, Some(1e-6)));
        rows.push(ComparisonRow::new("sensor minimum d2lambda", opt.delta2_closed, opt.delta2_numeric, Some(1e-10)));
        rows.push(ComparisonRow::new("sensor d2lambda at quoted g vs minimum", opt.delta2_closed, opt.delta2_at_quoted, None));
        if sc.sweep_param() == "g" && table.rows.len() > 2 {
            let i = (0..table.rows.len()).min_by(|&a, &b| table.rows[a][2].total_cmp(&table.rows[b][2])).unwrap_or(0);
            let lo = table.rows[i.saturating_sub(1)][1];
            let hi = table.rows[(i + 1).min(table.rows.len() - 1)][1];
            rows.push(ComparisonRow::check("sensor grid argmin brackets sqrt(gamma_a kappa_e / 2)", lo <= opt.g_closed && opt.g_closed <= hi));
        }
    }
    Ok((table, rows))
}
