//! Relaxation times, the critical drive, thermal occupation and the
//! driving-strength sensor.

use serde::{Deserialize, Serialize};

use crate::dynamics::SystemParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relaxation {
    /// Linearized relaxation onto the two-photon coherent state.
    TwoPhoton,
    /// Single-photon loss of the signal near `g = 0`.
    SinglePhoton,
}

/// `τ = γ_a(κ + κ_e)/(8gλ_a)` or `τ = 1/γ_b`.
pub fn characteristic_time(params: &SystemParams, regime: Relaxation) -> Result<f64> {
    match regime {
        Relaxation::TwoPhoton => {
            let kp = params.kappa()? + params.kappa_e;
            let den = 8.0 * params.g * params.lambda_a;
            if den == 0.0 {
                return Err(Error::Divergent("characteristic time"));
            }
            Ok(params.gamma_a * kp / den)
        }
        Relaxation::SinglePhoton => {
            if params.gamma_b == 0.0 {
                return Err(Error::Divergent("characteristic time"));
            }
            Ok(1.0 / params.gamma_b)
        }
    }
}

/// `λ_c = γ_aγ_b/(2g)`.
pub fn critical_lambda(params: &SystemParams) -> Result<f64> {
    if params.g == 0.0 {
        return Err(Error::Divergent("critical driving strength"));
    }
    Ok(params.gamma_a * params.gamma_b / (2.0 * params.g))
}

/// Bose occupation `1/(eˣ - 1)`.
pub fn thermal_occupation(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::InvalidParameter { name: "x", reason: format!("needs x > 0, got {x}") });
    }
    Ok(1.0 / x.exp_m1())
}

/// Golden-section minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `δ²λ_a = λ_a(2g² + γ_aκ_e)/(2g)` without single-photon signal loss.
pub fn delta2_lambda(params: &SystemParams) -> f64 {
    let g = params.g;
    params.lambda_a * (2.0 * g * g + params.gamma_a * params.kappa_e) / (2.0 * g)
}

/// Signal photon number `2gλ_a/(2g² + γ_aκ_e)` in the same regime.
pub fn sensor_photon_number(params: &SystemParams) -> f64 {
    let g = params.g;
    2.0 * g * params.lambda_a / (2.0 * g * g + params.gamma_a * params.kappa_e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorOptimum {
    /// Numerical argmin of `δ²λ_a` over `g`.
    pub g_numeric: f64,
    pub delta2_numeric: f64,
    /// `√(γ_aκ_e/2)` and `λ_a√(2γ_aκ_e)`.
    pub g_closed: f64,
    pub delta2_closed: f64,
    /// The coupling `√(γ_aκ_e)` quoted alongside the optimal value, and
    /// `δ²λ_a` actually attained there.
    pub g_quoted: f64,
    pub delta2_at_quoted: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorReport {
    pub delta2_lambda: f64,
    pub n_b: f64,
    /// `δ²λ_a · N_b`, identically `λ_a²`.
    pub delta2_lambda_times_nb: f64,
    /// Present when `κ_e > 0`; without extra pair loss `δ²λ_a` decreases
    /// monotonically as `g → 0`.
    pub optimum: Option<SensorOptimum>,
}

/// Driving-strength sensing with `γ_b = 0`.
pub fn lambda_sensor(params: &SystemParams) -> Result<SensorReport> {
    if params.gamma_b != 0.0 {
        return Err(Error::OutOfRegime { regime: "gb0", reason: format!("needs gamma_b = 0, got {}", params.gamma_b) });
    }
    if !(params.g > 0.0 && params.gamma_a > 0.0) {
        return Err(Error::InvalidParameter { name: "g", reason: "needs g > 0 and gamma_a > 0".into() });
    }
    let d2 = delta2_lambda(params);
    let nb = sensor_photon_number(params);
    let optimum = (params.kappa_e > 0.0).then(|| {
        // δ²λ_a is convex in ln g, so search there over a wide bracket.
        let f = |u: f64| delta2_lambda(&SystemParams { g: u.exp(), ..*params });
        let (u, _) = golden_section_min(f, -60.0, 60.0, 1e-12);
        let g_numeric = u.exp();
        let ak = params.gamma_a * params.kappa_e;
        let g_quoted = ak.sqrt();
        SensorOptimum {
            g_numeric,
            delta2_numeric: delta2_lambda(&SystemParams { g: g_numeric, ..*params }),
            g_closed: (ak / 2.0).sqrt(),
            delta2_closed: params.lambda_a * (2.0 * ak).sqrt(),
            g_quoted,
            delta2_at_quoted: delta2_lambda(&SystemParams { g: g_quoted, ..*params }),
        }
    });
    Ok(SensorReport { delta2_lambda: d2, n_b: nb, delta2_lambda_times_nb: d2 * nb, optimum })
}
