//! Closed-form estimation uncertainties `δ²g`.

use serde::{Deserialize, Serialize};

use crate::dynamics::SystemParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Reduced model, no single-photon signal loss, no extra pair loss.
    Gb0,
    /// Reduced model, no single-photon signal loss, extra pair loss `κ_e`.
    Gb0Kappa,
    /// Three-level truncation at `g = 0`.
    ThreeLevel,
    /// Linearized fluctuations in the normal phase, zero temperature.
    NormalPhase,
    /// Linearized fluctuations in the normal phase, thermal signal bath.
    Thermal,
    /// Thermal normal phase close to `λ_c`.
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    Photon,
    Homodyne { phi: f64 },
    /// The quantum Cramér–Rao bound `1/F`.
    Qcrb,
}

/// Which version of a formula is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// The expression as published.
    Printed,
    /// The expression re-derived from the same model; differs from the
    /// printed one only for the three-level, thermal and critical regimes.
    Rederived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub delta2: f64,
    pub regime: Regime,
    pub observable: Observable,
    pub variant: Variant,
}

fn out_of_regime(regime: &'static str, reason: String) -> Error {
    Error::OutOfRegime { regime, reason }
}

fn require_gb0(p: &SystemParams, regime: &'static str) -> Result<()> {
    if p.gamma_b != 0.0 {
        return Err(out_of_regime(regime, format!("needs gamma_b = 0, got {}", p.gamma_b)));
    }
    if !(p.g > 0.0 && p.lambda_a > 0.0 && p.gamma_a > 0.0) {
        return Err(out_of_regime(regime, "needs g, lambda_a, gamma_a > 0".into()));
    }
    Ok(())
}

fn require_normal(p: &SystemParams, regime: &'static str) -> Result<()> {
    let gamma = p.gamma_a * p.gamma_b;
    if !(gamma > 0.0 && p.lambda_a > 0.0) {
        return Err(out_of_regime(regime, "needs gamma_a, gamma_b, lambda_a > 0".into()));
    }
    if 2.0 * p.g.abs() * p.lambda_a >= gamma {
        return Err(out_of_regime(regime, format!("2 g lambda_a = {} is not below gamma_a gamma_b = {gamma}", 2.0 * p.g.abs() * p.lambda_a)));
    }
    Ok(())
}

fn unavailable(regime: &'static str, observable: Observable) -> Error {
    out_of_regime(regime, format!("no closed form for {observable:?}"))
}

/// `δ²g` for the given regime and observable.
pub fn delta2_g(regime: Regime, observable: Observable, params: &SystemParams, variant: Variant) -> Result<UncertaintyReport> {
    let p = params;
    let (g, l, ga, gb) = (p.g, p.lambda_a, p.gamma_a, p.gamma_b);
    let delta2 = match regime {
        Regime::Gb0 => {
            require_gb0(p, "gb0")?;
            if p.kappa_e != 0.0 {
                return Err(out_of_regime("gb0", format!("needs kappa_e = 0, got {}", p.kappa_e)));
            }
            match observable {
                Observable::Photon | Observable::Qcrb => g.powi(3) / l,
                Observable::Homodyne { phi } => {
                    let c = phi.cos() - phi.sin();
                    if c == 0.0 {
                        return Err(Error::DivergentUncertainty);
                    }
                    2.0 * g.powi(3) / (l * c * c)
                }
            }
        }
        Regime::Gb0Kappa => {
            require_gb0(p, "gb0_kappa")?;
            match observable {
                Observable::Photon | Observable::Qcrb => {
                    let (s, d) = (p.kappa_e * ga + 2.0 * g * g, p.kappa_e * ga - 2.0 * g * g);
                    if d == 0.0 {
                        return Err(Error::DivergentUncertainty);
                    }
                    g * s.powi(3) / (2.0 * l * d * d)
                }
                o => return Err(unavailable("gb0_kappa", o)),
            }
        }
        Regime::ThreeLevel => {
            let loss = p.kappa_e + gb;
            if !(ga > 0.0 && loss > 0.0 && l != 0.0) {
                return Err(out_of_regime("three_level", "needs gamma_a > 0, kappa_e + gamma_b > 0, lambda_a != 0".into()));
            }
            let pump = match variant {
                Variant::Printed => ga,
                Variant::Rederived => ga * ga,
            };
            let base = pump * loss * loss / (l * l);
            match observable {
                Observable::Photon => 3.0 / 16.0 * base,
                Observable::Homodyne { .. } => base,
                Observable::Qcrb => base / 6.0,
            }
        }
        Regime::NormalPhase => {
            require_normal(p, "normal_phase")?;
            match observable {
                Observable::Photon => thermal_photon(p, 0.0, variant),
                o => return Err(unavailable("normal_phase", o)),
            }
        }
        Regime::Thermal => {
            require_normal(p, "thermal")?;
            match observable {
                Observable::Photon => thermal_photon(p, p.nbar, variant),
                o => return Err(unavailable("thermal", o)),
            }
        }
        Regime::Critical => {
            require_normal(p, "critical")?;
            match observable {
                Observable::Photon => {
                    let gap = ga * gb - 2.0 * g * l;
                    match variant {
                        Variant::Printed => gap * gap / (4.0 * l * l * ga * gb),
                        Variant::Rederived => gap * gap / (2.0 * l * l),
                    }
                }
                o => return Err(unavailable("critical", o)),
            }
        }
    };
    Ok(UncertaintyReport { delta2, regime, observable, variant })
}

/// Photon-counting uncertainty of the linearized normal phase at thermal
/// occupation `nbar`.
///
/// The printed form is
/// `D²[(3+2n̄)Γ² + 4g²λ_a²(2n̄-1)] / (16(1+2n̄)λ_a²Γ⁴)` with `Γ = γ_aγ_b`,
/// `D = Γ² - 4g²λ_a²`. The re-derived form evaluates
/// `(n² + n + |m|²)/(∂_g n)²` from the linearized moments
/// `n = (2g²λ_a² + Γ²n̄)/D`, `m = -igλ_aΓ(1+2n̄)/D`; both coincide at `n̄ = 0`.
fn thermal_photon(p: &SystemParams, nbar: f64, variant: Variant) -> f64 {
    let (g, l) = (p.g, p.lambda_a);
    let gamma = p.gamma_a * p.gamma_b;
    let (g2l2, gam2) = (g * g * l * l, gamma * gamma);
    let d = gam2 - 4.0 * g2l2;
    match variant {
        Variant::Printed => {
            d * d * ((3.0 + 2.0 * nbar) * gam2 + 4.0 * g2l2 * (2.0 * nbar - 1.0))
                / (16.0 * (1.0 + 2.0 * nbar) * l * l * gam2 * gam2)
        }
        Variant::Rederived => {
            let n = (2.0 * g2l2 + gam2 * nbar) / d;
            let m2 = g2l2 * gam2 * (1.0 + 2.0 * nbar).powi(2) / (d * d);
            let dn = 4.0 * g * l * l * gam2 * (1.0 + 2.0 * nbar) / (d * d);
            (n * n + n + m2) / (dn * dn)
        }
    }
}
