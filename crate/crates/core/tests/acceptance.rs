//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero unless the failures are exactly the documented discrepancies.

use std::process::ExitCode;
use std::time::Instant;

use dpdc::analytic::{
    delta2_g, lambda_sensor, moment_ss, optimal_allocation, optimal_allocation_search, qfi_closed_form, qfi_gb0_kappa,
    qfi_three_level_zero, InitialState, Observable, Regime, Variant,
};
use dpdc::dynamics::{
    build_full_model, build_reduced_model, evolve_closed, evolve_open_trajectory, lossless_signal_dim,
    lossless_signal_steady_state, pdc_generator, spectral_gap_converged, steady_state, three_level_evolve,
    three_level_steady, SteadyTolerances, SystemParams, ThreeLevelState,
};
use dpdc::hilbert::{annihilation, coherent_state, expectation, DensityMatrix, FockSpace, StateVector};
use dpdc::meanfield::{build_w, delta2_g_normal, fluct_moments_analytic, fluct_moments_lyapunov, steady_solutions};
use dpdc::metrology::{error_propagation, gaussian_derivative, photon_stats, qfi_gaussian, qfi_pure, qfi_spectral, GaussianMoments};
use dpdc::ode::Tolerances;
use dpdc::Result;
use faer::c64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Criteria whose printed target cannot be met; see the README.
const KNOWN_DISCREPANCIES: [&str; 2] = ["3b", "5b"];

const INTEGRATOR: Tolerances = Tolerances { rtol: 1e-10, atol: 1e-13 };

fn fig2_params(g: f64) -> SystemParams {
    SystemParams { g, lambda_a: 0.01, gamma_a: 10.0, gamma_b: 1.0, kappa_e: 0.0, ..Default::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(f64::MIN_POSITIVE)
}

fn mean_number(rho: &DensityMatrix) -> f64 {
    (0..rho.dim()).map(|k| k as f64 * rho.population(k)).sum()
}

struct Suite {
    failed: Vec<&'static str>,
    passed: Vec<&'static str>,
    /// Worst health margins of every integrated state, for the hygiene check.
    trace_err: f64,
    herm_err: f64,
    min_eig: f64,
    integrations: usize,
}

impl Suite {
    fn record(&mut self, id: &'static str, ok: bool, what: &str, detail: String) {
        println!("{} {id:<4} {what}: {detail}", if ok { "PASS" } else { "FAIL" });
        if ok {
            self.passed.push(id);
        } else {
            self.failed.push(id);
        }
    }

    fn error(&mut self, id: &'static str, what: &str, e: dpdc::Error) {
        self.record(id, false, what, format!("error: {e}"));
    }

    fn info(&self, what: &str, detail: String) {
        println!("INFO      {what}: {detail}");
    }

    fn track(&mut self, rho: &DensityMatrix) -> Result<()> {
        let h = rho.health()?;
        self.trace_err = self.trace_err.max(h.trace_error);
        self.herm_err = self.herm_err.max(h.hermiticity_defect);
        self.min_eig = self.min_eig.min(h.min_eigenvalue);
        self.integrations += 1;
        Ok(())
    }
}

fn reduced_rho(p: &SystemParams, d: usize) -> Result<DensityMatrix> {
    Ok(steady_state(&build_reduced_model(p, d)?, SteadyTolerances::default())?.rho)
}

fn fig2(s: &mut Suite) -> Result<()> {
    let grid = [0.02, 0.05, 0.1, 0.2, 0.5];
    let mut devs = Vec::new();
    for g in grid {
        let p = fig2_params(g);
        let exact = mean_number(&reduced_rho(&p, 40)?);
        devs.push(rel(exact, three_level_steady(&p)?.photon_number()));
    }
    let decreasing = devs.windows(2).all(|w| w[0] < w[1]);
    let detail = devs.iter().zip(grid).map(|(d, g)| format!("g={g}: {d:.3e}")).collect::<Vec<_>>().join(", ");
    s.record("1", decreasing && devs[0] < 0.02, "three-level vs exact N_b, decreasing with g and < 2% at g=0.02", detail);
    Ok(())
}

fn moments(s: &mut Suite) -> Result<()> {
    let points = [(0.02, 0.01), (0.1, 0.01), (0.5, 0.01), (0.2, 0.005), (0.2, 0.02)];
    let mut worst = 0.0f64;
    for (g, lambda_a) in points {
        let p = SystemParams { lambda_a, ..fig2_params(g) };
        let rho = reduced_rho(&p, 40)?;
        let b = annihilation(FockSpace::new(40)?);
        for l in 0..=2 {
            for k in 0..=2 {
                let op = b.adjoint().pow(l).mul(&b.pow(k));
                worst = worst.max((expectation(&op, &rho)? - moment_ss(l, k, &p, 1e-16)?).norm());
            }
        }
    }
    s.record("2", worst < 1e-6, "series moments vs null-space steady state, l,k <= 2, 5 points", format!("max abs dev {worst:.3e} (< 1e-6)"));
    Ok(())
}

fn closed_qfi(s: &mut Suite) -> Result<()> {
    let (d_a, d_b) = (24, 18);
    let gen = pdc_generator(d_a, d_b)?;
    let spaces = [FockSpace::new(d_a)?, FockSpace::new(d_b)?];
    let mut cases = Vec::new();
    for alpha_sq in [0.5, 1.0, 2.0] {
        for n in 0..=2 {
            cases.push(InitialState::Semiclassical { alpha_sq, n: n as f64 });
        }
    }
    for n1 in 1..=2 {
        for n2 in 0..=2 {
            cases.push(InitialState::Quantum { n1: n1 as f64, n2: n2 as f64 });
        }
    }
    let mut worst = 0.0f64;
    let mut min_norm = f64::INFINITY;
    for init in cases {
        let psi0 = match init {
            InitialState::Semiclassical { alpha_sq, n } => {
                coherent_state(c64::new(alpha_sq.sqrt(), 0.0), spaces[0])?.tensor(&StateVector::fock(spaces[1], n as usize)?)
            }
            InitialState::Quantum { n1, n2 } => {
                StateVector::fock(spaces[0], n1 as usize)?.tensor(&StateVector::fock(spaces[1], n2 as usize)?)
            }
            InitialState::Classical { .. } => unreachable!(),
        };
        for (g, t) in [(0.05, 1.0), (0.1, 1.0), (0.02, 2.0)] {
            let family = |g: f64| evolve_closed(&gen.scale_re(g), &psi0, t, INTEGRATOR);
            min_norm = min_norm.min(family(g)?.norm());
            s.integrations += 1;
            let f = qfi_pure(family, g, 1e-4)?.value;
            worst = worst.max(rel(qfi_closed_form(init, t), f));
        }
    }
    s.trace_err = s.trace_err.max((1.0 - min_norm * min_norm).abs());
    s.record("3a", worst < 1e-4, "closed-evolution QFI vs closed forms, alpha^2 <= 2, n <= 2, gt <= 0.1", format!("max rel err {worst:.3e} (< 1e-4)"));

    let t = 1.0;
    let (n_best, f_best) = optimal_allocation_search(30, t);
    let (_, f_asym) = optimal_allocation(30.0, t);
    let dev = rel(f_asym, f_best);
    s.record(
        "3b",
        dev < 0.02,
        "optimal allocation grid search within 2% of 32/27 N^3 t^2 at N=30",
        format!("search F={f_best} at n={n_best}, 32/27 N^3 t^2 = {f_asym:.1}, rel dev {dev:.3e}"),
    );
    s.info("3b", "the lower-order terms 4(2 alpha^2 n + 2 alpha^2 + n^2 - n) t^2 contribute 10% at N = 30".into());
    Ok(())
}

fn saturation(s: &mut Suite) -> Result<()> {
    let mut worst_alg = 0.0f64;
    for g in [0.01, 0.05, 0.1, 0.2, 0.5, 1.0] {
        for kappa_e in [1e-3, 1e-2, 0.1] {
            let p = SystemParams { g, lambda_a: 1.0, gamma_a: 10.0, gamma_b: 0.0, kappa_e, ..Default::default() };
            let d2 = delta2_g(Regime::Gb0Kappa, Observable::Photon, &p, Variant::Printed)?.delta2;
            worst_alg = worst_alg.max((d2 * qfi_gb0_kappa(&p) - 1.0).abs());
        }
    }
    s.record("4a", worst_alg < 1e-12, "photon-counting d2g x Gaussian QFI = 1 (closed forms)", format!("max |product - 1| {worst_alg:.3e}"));

    let mut worst = 0.0f64;
    for g in [0.05, 0.1, 0.2] {
        let p = SystemParams { g, lambda_a: 1.0, gamma_a: 10.0, gamma_b: 0.0, kappa_e: 0.01, ..Default::default() };
        let d = lossless_signal_dim(&p, 1e-20)?;
        let family = |g: f64| -> Result<DensityMatrix> {
            Ok(lossless_signal_steady_state(&SystemParams { g, ..p }, d, SteadyTolerances::default())?.rho)
        };
        let step = 1e-4;
        let base = family(g)?;
        s.track(&base)?;
        let m = GaussianMoments::of_mode(&base, 0)?;
        let dm = gaussian_derivative(|g| GaussianMoments::of_mode(&family(g)?, 0), g, step)?;
        let f = qfi_gaussian(&m, &dm)?.value;
        let d2 = error_propagation(&photon_stats(family, g, step, 0)?)?;
        worst = worst.max((d2 * f - 1.0).abs());
    }
    s.record("4b", worst < 0.01, "same product from simulated steady states", format!("max |product - 1| {worst:.3e} (< 1e-2)"));
    Ok(())
}

fn three_level_bounds(s: &mut Suite) -> Result<()> {
    let p = fig2_params(0.0);
    let mut ok = true;
    let mut detail = Vec::new();
    for variant in [Variant::Printed, Variant::Rederived] {
        let get = |o| delta2_g(Regime::ThreeLevel, o, &p, variant).map(|r| r.delta2);
        let (q, ph, ho) = (get(Observable::Qcrb)?, get(Observable::Photon)?, get(Observable::Homodyne { phi: 0.0 })?);
        let (rq, rp) = (q / ho, ph / ho);
        ok &= q <= ph && ph <= ho && (rq - 1.0 / 6.0).abs() < 1e-12 && (rp - 3.0 / 16.0).abs() < 1e-12;
        detail.push(format!("{variant:?}: {rq:.6} <= {rp:.6} <= 1"));
    }
    s.record("5a", ok, "three-level prefactors 1/6 <= 3/16 <= 1 at g=0", detail.join("; "));

    let g = 1e-4;
    let family = |g: f64| reduced_rho(&fig2_params(g), 12);
    let f = qfi_spectral(family, g, 1e-5, 1e-30)?.value;
    let printed = qfi_three_level_zero(&p, Variant::Printed);
    let rederived = qfi_three_level_zero(&p, Variant::Rederived);
    s.record(
        "5b",
        rel(printed, f) < 0.01,
        "spectral QFI at g=1e-4 vs 6 lambda_a^2/(gamma_a (kappa_e+gamma_b)^2)",
        format!("F = {f:.6e}, formula {printed:.6e}, rel dev {:.3e}", rel(printed, f)),
    );
    s.info("5b", format!("against 6 lambda_a^2/(gamma_a^2 (kappa_e+gamma_b)^2) = {rederived:.6e}: rel dev {:.3e}", rel(rederived, f)));
    Ok(())
}

fn relaxation(s: &mut Suite) -> Result<()> {
    let gap_at = |p: SystemParams, min_dim: usize| -> Result<f64> {
        let d = if p.gamma_b == 0.0 { lossless_signal_dim(&p, 1e-20)?.max(min_dim) } else { min_dim };
        spectral_gap_converged(|d| build_reduced_model(&p, d), d, 10)
    };
    let lossless = |g| SystemParams { g, lambda_a: 1.0, gamma_a: 10.0, gamma_b: 0.0, kappa_e: 1e-4, ..Default::default() };
    let (hi, lo) = (gap_at(lossless(0.1), 20)?, gap_at(lossless(1e-3), 20)?);
    s.record("6a", hi / lo >= 10.0, "gap without signal loss drops >= 10x from g=0.1 to g=1e-3", format!("{hi:.4e} -> {lo:.4e}, ratio {:.1}", hi / lo));

    let mut gaps = Vec::new();
    for g in [0.1, 1e-2, 1e-3, 1e-4] {
        gaps.push(gap_at(fig2_params(g), 8)?);
    }
    let ok = gaps.iter().all(|&x| (0.5..=2.0).contains(&x));
    s.record("6b", ok, "gap with gamma_b=1 within a factor 2 of gamma_b as g -> 0", format!("{gaps:.4?}"));
    Ok(())
}

fn phase_structure(s: &mut Suite) -> Result<()> {
    let (gamma_a, gamma_b) = (10.0, 1.0);
    let mut disagreements = 0;
    let mut points = 0;
    for i in 0..20 {
        let g = 0.1 + 0.9 * (i as f64 + 0.37) / 20.0;
        for j in 0..20 {
            let lambda_a = 1.0 + 59.0 * (j as f64 + 0.61) / 20.0;
            let p = SystemParams { g, lambda_a, gamma_a, gamma_b, ..Default::default() };
            let above = lambda_a > gamma_a * gamma_b / (2.0 * g);
            let sols = steady_solutions(&p)?;
            let unstable = !build_w(&p, &sols[0])?.stable;
            points += 1;
            if (sols.len() > 1) != above || unstable != above {
                disagreements += 1;
            }
        }
    }
    s.record("7", disagreements == 0, "branches <=> lambda_a > lambda_c <=> normal branch unstable", format!("{disagreements} disagreements on {points} points"));
    Ok(())
}

fn lyapunov(s: &mut Suite) -> Result<()> {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut draws = 0;
    while draws < 120 {
        let g = rng.random_range(0.01..2.0);
        let gamma_a = rng.random_range(0.5..20.0);
        let gamma_b = rng.random_range(0.1..5.0);
        let lambda_a = rng.random_range(0.01..0.99) * gamma_a * gamma_b / (2.0 * g);
        let p = SystemParams { g, lambda_a, gamma_a, gamma_b, ..Default::default() };
        let w = build_w(&p, &steady_solutions(&p)?[0])?;
        if !w.stable {
            continue;
        }
        for nbar in [0.0, 0.5, 2.0] {
            let an = fluct_moments_analytic(&p, nbar, Variant::Rederived)?;
            let ly = fluct_moments_lyapunov(&w, &p, nbar)?;
            let scale = ly.n_fluct.abs().max(ly.anom.norm()).max(1e-300);
            worst = worst
                .max(rel(ly.n_fluct, an.n_fluct))
                .max((ly.anom - an.anom).norm() / scale)
                .max(rel(ly.fourth, an.fourth));
        }
        draws += 1;
    }
    s.record("8", worst < 1e-8, "fluctuation moments vs Lyapunov solution", format!("{draws} draws x nbar in {{0, 0.5, 2}}, max rel dev {worst:.3e}"));
    Ok(())
}

fn criticality(s: &mut Suite) -> Result<()> {
    let base = SystemParams { g: 0.5, lambda_a: 1.0, gamma_a: 10.0, gamma_b: 1.0, ..Default::default() };
    let lc = base.gamma_a * base.gamma_b / (2.0 * base.g);
    let fracs = [0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.99, 0.995, 0.999];
    let path = |variant, nbar: f64| -> Result<Vec<f64>> {
        fracs.iter().map(|f| Ok(delta2_g_normal(&SystemParams { lambda_a: f * lc, nbar, ..base }, nbar, variant)?.delta2)).collect()
    };
    let spread = |variant| -> Result<f64> {
        let at = SystemParams { lambda_a: 0.999 * lc, ..base };
        let v: Vec<f64> = (0..=20)
            .map(|k| Ok(delta2_g_normal(&SystemParams { nbar: 0.5 * k as f64, ..at }, 0.5 * k as f64, variant)?.delta2))
            .collect::<Result<_>>()?;
        let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        Ok((hi - lo) / lo)
    };
    let mut mono = true;
    for nbar in [0.0, 1.0, 10.0] {
        mono &= path(Variant::Printed, nbar)?.windows(2).all(|w| w[1] < w[0]);
    }
    s.record("9a", mono, "thermal d2g decreases monotonically as lambda_a -> 0.999 lambda_c", "nbar in {0, 1, 10}".into());
    let sp = spread(Variant::Printed)?;
    s.record("9b", sp < 0.01, "thermal d2g at 0.999 lambda_c varies < 1% over nbar in [0, 10]", format!("relative spread {sp:.3e}"));
    let mono_rd = [0.0, 1.0, 10.0].iter().all(|&n| path(Variant::Rederived, n).is_ok_and(|v| v.windows(2).all(|w| w[1] < w[0])));
    s.info("9", format!("re-derived thermal form: monotone {mono_rd}, relative spread over nbar {:.3e}", spread(Variant::Rederived)?));
    Ok(())
}

fn sensor(s: &mut Suite) -> Result<()> {
    let p = SystemParams { g: 0.1, lambda_a: 1.3, gamma_a: 10.0, gamma_b: 0.0, kappa_e: 0.01, ..Default::default() };
    let mut worst = 0.0f64;
    for g in [1e-3, 0.01, 0.1, 0.5, 2.0] {
        let r = lambda_sensor(&SystemParams { g, ..p })?;
        worst = worst.max(rel(p.lambda_a * p.lambda_a, r.delta2_lambda_times_nb));
    }
    s.record("10a", worst < 1e-12, "d2lambda_a x N_b = lambda_a^2", format!("max rel dev {worst:.3e}"));

    let opt = lambda_sensor(&p)?.optimum.expect("kappa_e > 0");
    // Independent bracket from a dense log grid.
    let grid: Vec<f64> = (0..=4000).map(|k| 10f64.powf(-4.0 + 6.0 * k as f64 / 4000.0)).collect();
    let d2 = |g: f64| lambda_sensor(&SystemParams { g, ..p }).map(|r| r.delta2_lambda);
    let vals = grid.iter().map(|&g| d2(g)).collect::<Result<Vec<_>>>()?;
    let i = (0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    let bracket = grid[i.saturating_sub(1)] <= opt.g_closed && opt.g_closed <= grid[(i + 1).min(grid.len() - 1)];
    let ok = bracket && rel(opt.g_closed, opt.g_numeric) < 1e-6 && rel(opt.delta2_closed, opt.delta2_numeric) < 1e-10;
    s.record(
        "10b",
        ok,
        "argmin at sqrt(gamma_a kappa_e/2), minimum lambda_a sqrt(2 gamma_a kappa_e)",
        format!(
            "argmin rel dev {:.3e}, minimum rel dev {:.3e}, grid bracket {bracket}",
            rel(opt.g_closed, opt.g_numeric),
            rel(opt.delta2_closed, opt.delta2_numeric)
        ),
    );
    s.info("10", format!("d2lambda_a at g = sqrt(gamma_a kappa_e) is {:.6e}, above the minimum {:.6e}", opt.delta2_at_quoted, opt.delta2_closed));
    Ok(())
}

fn hygiene(s: &mut Suite) -> Result<()> {
    let tol = INTEGRATOR.rtol.max(INTEGRATOR.atol);
    let p = fig2_params(0.3);
    let times = [0.1, 1.0, 5.0, 20.0];
    let reduced = build_reduced_model(&SystemParams { lambda_a: 2.0, nbar: 0.3, ..p }, 16)?;
    let vac = DensityMatrix::pure(&StateVector::vacuum(&[16]));
    for rho in evolve_open_trajectory(&reduced, &vac, &times, INTEGRATOR)? {
        s.track(&rho)?;
    }
    let full = build_full_model(&SystemParams { lambda_a: 5.0, ..p }, 6, 8)?;
    let vac = DensityMatrix::pure(&StateVector::vacuum(&[6, 8]));
    for rho in evolve_open_trajectory(&full, &vac, &times, INTEGRATOR)? {
        s.track(&rho)?;
    }
    for t in times {
        s.track(&three_level_evolve(&SystemParams { lambda_a: 1.0, ..p }, &ThreeLevelState::ground(), t, INTEGRATOR)?.to_density_matrix())?;
    }
    let ok = s.trace_err < 10.0 * tol && s.herm_err < 10.0 * tol && s.min_eig >= -1e3 * tol;
    let detail = format!(
        "{} states: max |tr - 1| {:.2e}, max herm defect {:.2e}, min eigenvalue {:.2e} (limits {:.0e}, {:.0e}, -{:.0e})",
        s.integrations,
        s.trace_err,
        s.herm_err,
        s.min_eig,
        10.0 * tol,
        10.0 * tol,
        1e3 * tol
    );
    s.record("11", ok, "trace, Hermiticity and positivity of integrated states", detail);
    Ok(())
}

type Criterion = (&'static str, &'static str, fn(&mut Suite) -> Result<()>);

fn main() -> ExitCode {
    faer::set_global_parallelism(faer::Par::Seq);
    let mut s = Suite { failed: vec![], passed: vec![], trace_err: 0.0, herm_err: 0.0, min_eig: 0.0, integrations: 0 };
    let criteria: [Criterion; 11] = [
        ("1", "fig2 regression", fig2),
        ("2", "moment oracle", moments),
        ("3", "closed-system QFI", closed_qfi),
        ("4", "QCRB saturation", saturation),
        ("5", "three-level bounds", three_level_bounds),
        ("6", "spectral gap", relaxation),
        ("7", "phase structure", phase_structure),
        ("8", "Lyapunov oracle", lyapunov),
        ("9", "criticality", criticality),
        ("10", "sensor", sensor),
        ("11", "evolution hygiene", hygiene),
    ];
    for (id, what, run) in criteria {
        let start = Instant::now();
        if let Err(e) = run(&mut s) {
            s.error(id, what, e);
        }
        println!("          ({id} took {:.1}s)", start.elapsed().as_secs_f64());
    }

    let unexpected: Vec<_> = s.failed.iter().filter(|id| !KNOWN_DISCREPANCIES.contains(id)).collect();
    let resolved: Vec<_> = KNOWN_DISCREPANCIES.iter().filter(|id| s.passed.contains(id)).collect();
    println!("passed {}, failed {} (known discrepancies: {})", s.passed.len(), s.failed.len(), KNOWN_DISCREPANCIES.join(", "));
    if unexpected.is_empty() && resolved.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures {unexpected:?}, known discrepancies now passing {resolved:?}");
        ExitCode::FAILURE
    }
}
