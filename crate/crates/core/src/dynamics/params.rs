use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical rates and amplitudes of the down-conversion model.
///
/// Frequencies only enter through the resonance condition `ω₁ = 2ω₂`; all
/// dynamics are written in the frame rotating with the drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemParams {
    pub g: f64,
    pub lambda_a: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub kappa_e: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub nbar: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self { g: 0.1, lambda_a: 0.01, gamma_a: 10.0, gamma_b: 1.0, kappa_e: 0.0, omega1: 2.0, omega2: 1.0, nbar: 0.0 }
    }
}

impl SystemParams {
    pub const FIELDS: [&'static str; 8] = ["g", "lambda_a", "gamma_a", "gamma_b", "kappa_e", "omega1", "omega2", "nbar"];

    pub fn validate(&self) -> Result<()> {
        for name in Self::FIELDS {
            let v = self.get(name).expect("known field");
            if !v.is_finite() {
                return Err(invalid(name, format!("{v} is not finite")));
            }
        }
        for (name, v) in [("gamma_a", self.gamma_a), ("gamma_b", self.gamma_b), ("kappa_e", self.kappa_e), ("nbar", self.nbar)] {
            if v < 0.0 {
                return Err(invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        if (self.omega1 - 2.0 * self.omega2).abs() > 1e-12 * self.omega1.abs().max(1.0) {
            return Err(invalid("omega1", format!("resonance requires omega1 = 2 omega2, got {} and {}", self.omega1, self.omega2)));
        }
        Ok(())
    }

    /// Pump-induced two-photon loss rate `κ = 2g²/γ_a`.
    pub fn kappa(&self) -> Result<f64> {
        self.require_pump_loss()?;
        Ok(2.0 * self.g * self.g / self.gamma_a)
    }

    /// Effective two-photon drive `gλ_a/γ_a` of the eliminated pump.
    pub fn two_photon_drive(&self) -> Result<f64> {
        self.require_pump_loss()?;
        Ok(self.g * self.lambda_a / self.gamma_a)
    }

    fn require_pump_loss(&self) -> Result<()> {
        if self.gamma_a > 0.0 {
            Ok(())
        } else {
            Err(invalid("gamma_a", "adiabatic elimination needs gamma_a > 0".into()))
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "g" => self.g,
            "lambda_a" => self.lambda_a,
            "gamma_a" => self.gamma_a,
            "gamma_b" => self.gamma_b,
            "kappa_e" => self.kappa_e,
            "omega1" => self.omega1,
            "omega2" => self.omega2,
            "nbar" => self.nbar,
            _ => return None,
        })
    }

    /// Copy with one field replaced, addressed by name.
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        let mut p = *self;
        let slot = match name {
            "g" => &mut p.g,
            "lambda_a" => &mut p.lambda_a,
            "gamma_a" => &mut p.gamma_a,
            "gamma_b" => &mut p.gamma_b,
            "kappa_e" => &mut p.kappa_e,
            "omega1" => &mut p.omega1,
            "omega2" => &mut p.omega2,
            "nbar" => &mut p.nbar,
            _ => return Err(Error::Config(format!("unknown parameter `{name}`"))),
        };
        *slot = value;
        Ok(p)
    }
}

fn invalid(name: &'static str, reason: String) -> Error {
    Error::InvalidParameter { name, reason }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SystemParams::default().validate().unwrap();
    }

    #[test]
    fn kappa_needs_pump_loss() {
        let p = SystemParams { gamma_a: 0.0, ..Default::default() };
        assert!(p.kappa().is_err());
        let p = SystemParams { g: 0.5, gamma_a: 10.0, ..Default::default() };
        assert!((p.kappa().unwrap() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn negative_rates_and_detuning_rejected() {
        assert!(SystemParams { gamma_b: -1.0, ..Default::default() }.validate().is_err());
        assert!(SystemParams { omega1: 3.0, ..Default::default() }.validate().is_err());
        assert!(SystemParams { nbar: f64::NAN, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn with_addresses_every_field() {
        let p = SystemParams::default();
        for (k, name) in SystemParams::FIELDS.iter().enumerate() {
            let q = p.with(name, k as f64 + 0.5).unwrap();
            assert_eq!(q.get(name), Some(k as f64 + 0.5));
        }
        assert!(p.with("chi", 1.0).is_err());
    }
}
