//! Semiclassical steady states of the two-mode model, their linear stability
//! and the stationary fluctuation moments of the normal phase.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::analytic::{delta2_g, Observable, Regime, UncertaintyReport, Variant};
use crate::dynamics::SystemParams;
use crate::error::{Error, Result};
use crate::metrology::{error_propagation, MeasurementRecord};

/// Eigenvalues with `|Re λ|` below this are treated as marginal.
pub const STABILITY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Normal,
    SuperradiantPlus,
    SuperradiantMinus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldSolution {
    pub amp_a: c64,
    pub amp_b: c64,
    pub branch: Branch,
}

impl MeanFieldSolution {
    /// Largest modulus of `-ig⟨b⟩² - γ_a⟨a⟩ + λ_a` and
    /// `-2ig⟨a⟩⟨b⟩* - γ_b⟨b⟩`.
    pub fn residual(&self, p: &SystemParams) -> f64 {
        let i = c64::new(0.0, 1.0);
        let (a, b) = (self.amp_a, self.amp_b);
        let ra = -i * p.g * b * b - a * p.gamma_a + p.lambda_a;
        let rb = -i * (2.0 * p.g) * a * b.conj() - b * p.gamma_b;
        ra.norm().max(rb.norm())
    }
}

/// The normal solution `(λ_a/γ_a, 0)`, followed by both superradiant branches
/// `⟨a⟩ = γ_b/(2g)`, `⟨b⟩ = ±s(1 - i)` with `s = √(2gλ_a - γ_aγ_b)/(2g)` when
/// `2gλ_a > γ_aγ_b`.
pub fn steady_solutions(params: &SystemParams) -> Result<Vec<MeanFieldSolution>> {
    let (g, l, ga, gb) = (params.g, params.lambda_a, params.gamma_a, params.gamma_b);
    if !(ga > 0.0) {
        return Err(Error::InvalidParameter { name: "gamma_a", reason: "mean-field solutions need gamma_a > 0".into() });
    }
    let zero = c64::new(0.0, 0.0);
    let mut out = vec![MeanFieldSolution { amp_a: c64::new(l / ga, 0.0), amp_b: zero, branch: Branch::Normal }];
    let excess = 2.0 * g * l - ga * gb;
    if g != 0.0 && excess > 0.0 {
        let s = excess.sqrt() / (2.0 * g);
        let amp_a = c64::new(gb / (2.0 * g), 0.0);
        out.push(MeanFieldSolution { amp_a, amp_b: c64::new(s, -s), branch: Branch::SuperradiantPlus });
        out.push(MeanFieldSolution { amp_a, amp_b: c64::new(-s, s), branch: Branch::SuperradiantMinus });
    }
    Ok(out)
}

/// Linearization around a mean-field solution, in the basis
/// `(δa, δa†, δb, δb†)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub w: [[c64; 4]; 4],
    pub eigenvalues: Vec<c64>,
    pub stable: bool,
    /// Some eigenvalue has `|Re λ| ≤ STABILITY_THRESHOLD`.
    pub marginal: bool,
}

pub fn build_w(params: &SystemParams, sol: &MeanFieldSolution) -> Result<StabilityReport> {
    let i = c64::new(0.0, 1.0);
    let z = c64::new(0.0, 0.0);
    let (ga, gb) = (c64::new(-params.gamma_a, 0.0), c64::new(-params.gamma_b, 0.0));
    let k = 2.0 * params.g;
    let (a, b) = (sol.amp_a, sol.amp_b);
    let w = [
        [ga, z, -i * k * b, z],
        [z, ga, z, i * k * b.conj()],
        [-i * k * b.conj(), z, gb, -i * k * a],
        [z, i * k * b, i * k * a.conj(), gb],
    ];
    let m = Mat::<c64>::from_fn(4, 4, |r, c| w[r][c]);
    let eigenvalues = m.eigenvalues().map_err(|_| Error::EigenFailure)?;
    let stable = eigenvalues.iter().all(|e| e.re < -STABILITY_THRESHOLD);
    let marginal = eigenvalues.iter().any(|e| e.re.abs() <= STABILITY_THRESHOLD);
    Ok(StabilityReport { w, eigenvalues, stable, marginal })
}

/// Signal-mode fluctuation moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationMoments {
    /// `⟨δb†δb⟩`
    pub n_fluct: f64,
    /// `⟨(δb)²⟩`
    pub anom: c64,
    /// `⟨(δb†δb)²⟩` by Gaussian decoupling at zero mean fluctuation.
    pub fourth: f64,
}

impl FluctuationMoments {
    fn decoupled(n_fluct: f64, anom: c64) -> Self {
        Self { n_fluct, anom, fourth: 2.0 * n_fluct * n_fluct + n_fluct + anom.norm_sqr() }
    }
}

fn require_normal(params: &SystemParams) -> Result<()> {
    let gamma = params.gamma_a * params.gamma_b;
    if !(gamma > 0.0) {
        return Err(Error::OutOfRegime { regime: "normal_phase", reason: "needs gamma_a, gamma_b > 0".into() });
    }
    if 2.0 * params.g.abs() * params.lambda_a.abs() >= gamma {
        return Err(Error::OutOfRegime {
            regime: "normal_phase",
            reason: format!("2|g lambda_a| = {} reaches gamma_a gamma_b = {gamma}", 2.0 * (params.g * params.lambda_a).abs()),
        });
    }
    Ok(())
}

/// Closed-form normal-phase moments with `Γ = γ_aγ_b`:
/// `n = (2g²λ_a² + Γ²n̄)/(Γ² - 4g²λ_a²)`,
/// `⟨(δb)²⟩ = -igλ_aΓ(1 + 2n̄)/(Γ² - 4g²λ_a²)`.
///
/// `Variant::Printed` evaluates the zero-temperature expressions as
/// published, with denominator `Γ - 4g²λ_a²` and an extra factor ½ on the
/// anomalous moment. `nbar` overrides `params.nbar`.
pub fn fluct_moments_analytic(params: &SystemParams, nbar: f64, variant: Variant) -> Result<FluctuationMoments> {
    require_normal(params)?;
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter { name: "nbar", reason: format!("{nbar} is not a valid occupation") });
    }
    let (g, l) = (params.g, params.lambda_a);
    let gam = params.gamma_a * params.gamma_b;
    let g2l2 = g * g * l * l;
    let (n, anom) = match variant {
        Variant::Rederived => {
            let d = gam * gam - 4.0 * g2l2;
            ((2.0 * g2l2 + gam * gam * nbar) / d, c64::new(0.0, -g * l * gam * (1.0 + 2.0 * nbar) / d))
        }
        Variant::Printed => {
            if nbar != 0.0 {
                return Err(Error::OutOfRegime { regime: "normal_phase", reason: "printed moments are zero-temperature only".into() });
            }
            let d = gam - 4.0 * g2l2;
            (2.0 * g2l2 / d, c64::new(0.0, -g * l * gam / (2.0 * d)))
        }
    };
    Ok(FluctuationMoments::decoupled(n, anom))
}

/// Stationary covariance `S_ij = ⟨h_i h_j⟩` of `ḣ = Wh + ξ`, solving
/// `WS + SWᵀ + D = 0` with `⟨ξ_i(t)ξ_j(t')⟩ = D_ij δ(t - t')`.
///
/// The pump bath is vacuum (`D_{a a†} = 2γ_a`), the signal bath thermal
/// (`D_{b b†} = 2γ_b(n̄ + 1)`, `D_{b† b} = 2γ_b n̄`).
pub fn lyapunov_covariance(report: &StabilityReport, params: &SystemParams, nbar: f64) -> Result<[[c64; 4]; 4]> {
    if !report.stable {
        return Err(Error::Unstable);
    }
    let w = &report.w;
    let mut d = [[c64::new(0.0, 0.0); 4]; 4];
    d[0][1] = c64::new(2.0 * params.gamma_a, 0.0);
    d[2][3] = c64::new(2.0 * params.gamma_b * (nbar + 1.0), 0.0);
    d[3][2] = c64::new(2.0 * params.gamma_b * nbar, 0.0);

    // vec(WS + SWᵀ) = (I⊗W + W⊗I) vec S, column-stacked: index i + 4j.
    let a = Mat::<c64>::from_fn(16, 16, |r, c| {
        let (i, j) = (r % 4, r / 4);
        let (k, l) = (c % 4, c / 4);
        let mut v = c64::new(0.0, 0.0);
        if l == j {
            v += w[i][k];
        }
        if k == i {
            v += w[j][l];
        }
        v
    });
    let mut rhs = Mat::<c64>::from_fn(16, 1, |r, _| -d[r % 4][r / 4]);
    a.partial_piv_lu().solve_in_place(rhs.as_mut());
    let mut s = [[c64::new(0.0, 0.0); 4]; 4];
    for r in 0..16 {
        let v = rhs[(r, 0)];
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::SingularCovariance);
        }
        s[r % 4][r / 4] = v;
    }
    Ok(s)
}

/// Signal moments read from the Lyapunov covariance:
/// `⟨δb†δb⟩ = S₄₃`, `⟨(δb)²⟩ = S₃₃`.
pub fn fluct_moments_lyapunov(report: &StabilityReport, params: &SystemParams, nbar: f64) -> Result<FluctuationMoments> {
    let s = lyapunov_covariance(report, params, nbar)?;
    Ok(FluctuationMoments::decoupled(s[3][2].re, s[2][2]))
}

fn normal_report(params: &SystemParams) -> Result<StabilityReport> {
    let sol = steady_solutions(params)?[0];
    build_w(params, &sol)
}

/// Photon-counting `δ²g` in the normal phase from the closed forms;
/// `nbar` overrides `params.nbar`.
///
/// `Variant::Printed` is the published thermal expression, `Rederived` is
/// `(n² + n + |⟨(δb)²⟩|²)/(∂_g n)²` from [`fluct_moments_analytic`].
pub fn delta2_g_normal(params: &SystemParams, nbar: f64, variant: Variant) -> Result<UncertaintyReport> {
    require_normal(params)?;
    let p = SystemParams { nbar, ..*params };
    delta2_g(Regime::Thermal, Observable::Photon, &p, variant)
}

/// The same uncertainty assembled numerically: the mean and variance of
/// `b†b` come from the Lyapunov covariance at `g`, and the derivative of the
/// mean from central differences of the covariance at `g ± step`.
pub fn delta2_g_normal_lyapunov(params: &SystemParams, nbar: f64, step: f64) -> Result<f64> {
    require_normal(params)?;
    let n_at = |g: f64| -> Result<f64> {
        let p = SystemParams { g, ..*params };
        Ok(fluct_moments_lyapunov(&normal_report(&p)?, &p, nbar)?.n_fluct)
    };
    let m = fluct_moments_lyapunov(&normal_report(params)?, params, nbar)?;
    let g = params.g;
    let d1 = (n_at(g + step)? - n_at(g - step)?) / (2.0 * step);
    let d2 = (n_at(g + 0.5 * step)? - n_at(g - 0.5 * step)?) / step;
    let rec = MeasurementRecord::new(m.n_fluct, m.fourth - m.n_fluct * m.n_fluct, (4.0 * d2 - d1) / 3.0)?;
    error_propagation(&rec)
}
