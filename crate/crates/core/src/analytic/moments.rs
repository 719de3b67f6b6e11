//! Steady-state moments of the reduced signal-mode model.

use faer::c64;

use super::special::hyp2f1_half_sequence;
use crate::dynamics::SystemParams;
use crate::error::{Error, Result};

pub const MOMENT_TERM_BUDGET: usize = 100_000;

/// Parameters of the hypergeometric moment series.
///
/// `mu² = -4ih/κ'` with `h = gλ_a/γ_a` and `κ' = κ + κ_e`; `y = γ_b/κ'`,
/// `z = 2y`. At `κ_e = 0` these are `μ = i√(2iλ_a/g)` and
/// `z = γ_aγ_b/g²`, i.e. the familiar expressions once the single-photon rate
/// is expressed in the `cρc† - ½{c†c, ρ}` normalization (`γ_b → 2γ_b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentParams {
    pub mu: c64,
    pub y: f64,
    pub z: f64,
}

impl MomentParams {
    pub fn from_params(p: &SystemParams) -> Result<Self> {
        if !(p.g > 0.0) {
            return Err(Error::InvalidParameter { name: "g", reason: "moment series needs g > 0".into() });
        }
        if p.nbar != 0.0 && p.gamma_b != 0.0 {
            return Err(Error::OutOfRegime { regime: "moment series", reason: format!("needs a zero-temperature bath, nbar = {}", p.nbar) });
        }
        let h = p.two_photon_drive()?;
        let kp = p.kappa()? + p.kappa_e;
        let mu = c64::new(0.0, 1.0) * c64::new(0.0, 4.0 * h / kp).sqrt();
        let y = p.gamma_b / kp;
        Ok(Self { mu, y, z: 2.0 * y })
    }

    /// The same quantities written with the rates taken literally:
    /// `μ = i√(2iλ_a/g)`, `y = γ_aγ_b/(4g²)`, `z = γ_aγ_b/(2g²)`.
    pub fn literal(p: &SystemParams) -> Result<Self> {
        if !(p.g > 0.0) {
            return Err(Error::InvalidParameter { name: "g", reason: "moment series needs g > 0".into() });
        }
        let mu = c64::new(0.0, 1.0) * c64::new(0.0, 2.0 * p.lambda_a / p.g).sqrt();
        let y = p.gamma_a * p.gamma_b / (4.0 * p.g * p.g);
        Ok(Self { mu, y, z: 2.0 * y })
    }
}

/// Outcome of a converged moment series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSeries {
    pub value: c64,
    pub terms: usize,
}

/// `⟨b†ˡ bᵏ⟩` in the steady state of the reduced model:
///
/// `(1/(𝒩 √2^{l+k})) Σ_m F*_{m+l} F_{m+k} / m!`, `F_j = (-μ)ʲ ₂F₁[-j, y; z; 2]`,
/// `𝒩 = Σ_m |μ|^{2m}/m! |₂F₁[-m, y; z; 2]|²`.
///
/// The sum stops once `m > |μ|²` and five consecutive non-vanishing terms
/// fall below `series_tol` relative to the running sums.
pub fn moment_ss(l: u32, k: u32, params: &SystemParams, series_tol: f64) -> Result<c64> {
    Ok(moment_series(l, k, &MomentParams::from_params(params)?, series_tol)?.value)
}

pub fn moment_series(l: u32, k: u32, mp: &MomentParams, series_tol: f64) -> Result<MomentSeries> {
    let (l, k) = (l as usize, k as usize);
    let r2 = mp.mu.norm_sqr();
    let shift = l.max(k);

    let mut f = hyp2f1_half_sequence(64 + shift, mp.z);
    let mut log_w = 0.0f64; // ln(|μ|^{2m}/m!)
    let mut reference = 0.0f64;
    let (mut num, mut den) = (0.0f64, 0.0f64);
    let mut quiet = 0;

    for m in 0..MOMENT_TERM_BUDGET {
        if m > 0 {
            log_w += (r2 / m as f64).ln();
        }
        if m + shift >= f.len() {
            f = hyp2f1_half_sequence(2 * f.len() + shift, mp.z);
        }
        let (fn_, fl, fk) = (f[m], f[m + l], f[m + k]);
        if fn_ == 0.0 && fl * fk == 0.0 {
            continue;
        }
        if log_w > reference {
            let s = (reference - log_w).exp();
            num *= s;
            den *= s;
            reference = log_w;
        }
        let w = (log_w - reference).exp();
        let (tn, td) = (w * fl * fk, w * fn_ * fn_);
        num += tn;
        den += td;
        let small = tn.abs() <= series_tol * num.abs() && td.abs() <= series_tol * den.abs();
        quiet = if small { quiet + 1 } else { 0 };
        if quiet >= 5 && m as f64 > r2 {
            let minus_mu = -mp.mu;
            let phase = minus_mu.conj().powu(l as u32) * minus_mu.powu(k as u32);
            let value = phase * (num / den) / 2f64.powf((l + k) as f64 / 2.0);
            return Ok(MomentSeries { value, terms: m + 1 });
        }
    }
    Err(Error::SeriesNotConverged { terms: MOMENT_TERM_BUDGET })
}

/// Product-form moments when single-photon loss of the signal vanishes:
/// `(i√(-ic))ˡ (-i√(ic))ᵏ` with `c = 2gλ_a/(γ_a(κ + κ_e))`; at `κ_e = 0`,
/// `c = λ_a/g`.
pub fn moment_gb0(l: u32, k: u32, params: &SystemParams) -> Result<c64> {
    if params.gamma_b != 0.0 {
        return Err(Error::OutOfRegime { regime: "gb0", reason: format!("gamma_b = {} is not zero", params.gamma_b) });
    }
    let kp = params.kappa()? + params.kappa_e;
    if kp == 0.0 {
        return Err(Error::Divergent("two-photon amplitude"));
    }
    let c = 2.0 * params.g * params.lambda_a / (params.gamma_a * kp);
    let i = c64::new(0.0, 1.0);
    let bra = i * (-i * c).sqrt();
    let ket = -i * (i * c).sqrt();
    Ok(bra.powu(l) * ket.powu(k))
}
