//! Signal mode restricted to `|0⟩, |1⟩, |2⟩`, valid for weak coupling.
//!
//! Rates: `h = gλ_a/γ_a` drives `|0⟩ ↔ |2⟩` with matrix element `√2 h`, pairs
//! are lost at `κ' = 2g²/γ_a + κ_e` and single photons at `γ_b`, all under the
//! `γ(2cρc† - …)` dissipator.

use faer::{c64, Mat};

use super::params::SystemParams;
use crate::error::Result;
use crate::hilbert::DensityMatrix;
use crate::ode::{integrate, Tolerances};

/// Independent entries of a three-level density matrix.
///
/// `ρ₁₁` is carried alongside `ρ₀₀` and `ρ₂₂` rather than recovered from
/// `1 - ρ₀₀ - ρ₂₂`, which loses all digits when the excited populations are
/// tiny.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelState {
    pub rho00: f64,
    pub rho11: f64,
    pub rho22: f64,
    pub rho10: c64,
    pub rho21: c64,
    pub rho20: c64,
}

impl ThreeLevelState {
    pub fn ground() -> Self {
        let z = c64::new(0.0, 0.0);
        Self { rho00: 1.0, rho11: 0.0, rho22: 0.0, rho10: z, rho21: z, rho20: z }
    }

    /// `⟨b†b⟩ = ρ₁₁ + 2ρ₂₂`.
    pub fn photon_number(&self) -> f64 {
        self.rho11 + 2.0 * self.rho22
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let r = |x: f64| c64::new(x, 0.0);
        let rows = [
            [r(self.rho00), self.rho10.conj(), self.rho20.conj()],
            [self.rho10, r(self.rho11), self.rho21.conj()],
            [self.rho20, self.rho21, r(self.rho22)],
        ];
        let m = Mat::<c64>::from_fn(3, 3, |i, j| rows[i][j]);
        DensityMatrix::from_matrix_unchecked(m, vec![3]).expect("3x3 matrix")
    }

    fn pack(&self) -> [c64; 6] {
        let r = |x: f64| c64::new(x, 0.0);
        [r(self.rho00), r(self.rho22), self.rho10, self.rho21, self.rho20, r(self.rho11)]
    }

    fn unpack(y: &[c64]) -> Self {
        Self { rho00: y[0].re, rho11: y[5].re, rho22: y[1].re, rho10: y[2], rho21: y[3], rho20: y[4] }
    }
}

fn rates(p: &SystemParams) -> Result<(f64, f64, f64)> {
    let s = 2f64.sqrt() * p.two_photon_drive()?;
    let kp = p.kappa()? + p.kappa_e;
    Ok((s, kp, p.gamma_b))
}

fn rhs(s: f64, kp: f64, gb: f64, y: &[c64], dy: &mut [c64]) {
    let i = c64::new(0.0, 1.0);
    let (r00, r22, r10, r21, r20, r11) = (y[0], y[1], y[2], y[3], y[4], y[5]);
    dy[0] = -i * s * (r20 - r20.conj()) + r11 * (2.0 * gb) + r22 * (4.0 * kp);
    dy[1] = -r22 * (4.0 * (kp + gb)) - i * s * (r20.conj() - r20);
    dy[2] = (r21 * (2.0 * 2f64.sqrt()) - r10) * gb + i * s * r21.conj();
    dy[3] = -r21 * (2.0 * kp + 3.0 * gb) - i * s * r10.conj();
    dy[4] = -r20 * (2.0 * kp + 2.0 * gb) - i * s * (r00 - r22);
    dy[5] = (r22 * 4.0 - r11 * 2.0) * gb;
}

/// Integrates the three-level equations for time `t`.
///
/// Besides the populations `ρ₀₀, ρ₂₂` and coherences `ρ₁₀, ρ₂₁, ρ₂₀`, `ρ₁₁`
/// follows `ρ̇₁₁ = 4γ_bρ₂₂ - 2γ_bρ₁₁`.
pub fn three_level_evolve(params: &SystemParams, rho0: &ThreeLevelState, t: f64, tol: Tolerances) -> Result<ThreeLevelState> {
    let (s, kp, gb) = rates(params)?;
    let (y, _) = integrate(|_, y, dy| rhs(s, kp, gb, y, dy), 0.0, t, &rho0.pack(), tol)?;
    Ok(ThreeLevelState::unpack(&y))
}

/// Closed-form stationary state with `A = 2g² + γ_a(κ_e + γ_b)`.
pub fn three_level_steady(params: &SystemParams) -> Result<ThreeLevelState> {
    params.kappa()?;
    let (g, l, ga) = (params.g, params.lambda_a, params.gamma_a);
    let a = 2.0 * g * g + ga * (params.kappa_e + params.gamma_b);
    let g2l2 = g * g * l * l;
    let den = 2.0 * a * a + 4.0 * g2l2;
    let z = c64::new(0.0, 0.0);
    Ok(ThreeLevelState {
        rho00: (2.0 * a * a + g2l2) / den,
        rho11: 2.0 * g2l2 / den,
        rho22: g2l2 / den,
        rho10: z,
        rho21: z,
        rho20: c64::new(0.0, -2f64.sqrt() * g * a * l / den),
    })
}
