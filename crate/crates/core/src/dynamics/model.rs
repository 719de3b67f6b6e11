use faer::c64;

use super::params::SystemParams;
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, embed, FockSpace, Operator};

/// A collapse operator and its rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub rate: f64,
    pub op: Operator,
}

/// Hamiltonian plus dissipative channels, with the dissipator
/// `γ (2cρc† - c†cρ - ρc†c)` for each channel `(γ, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    hamiltonian: Operator,
    channels: Vec<Channel>,
}

impl LindbladModel {
    pub fn new(hamiltonian: Operator, channels: Vec<Channel>) -> Result<Self> {
        let scale = hamiltonian.matrix().max_abs().max(1.0);
        let defect = hamiltonian.hermiticity_defect();
        if defect > 1e-12 * scale {
            return Err(Error::NonHermitian(defect));
        }
        for ch in &channels {
            if !(ch.rate.is_finite() && ch.rate >= 0.0) {
                return Err(Error::InvalidParameter { name: "rate", reason: format!("channel rate {} is not a non-negative number", ch.rate) });
            }
            if ch.op.dims() != hamiltonian.dims() {
                return Err(Error::DimensionMismatch { expected: hamiltonian.dim(), found: ch.op.dim() });
            }
        }
        Ok(Self { hamiltonian, channels })
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn dims(&self) -> &[usize] {
        self.hamiltonian.dims()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn is_dissipative(&self) -> bool {
        self.channels.iter().any(|c| c.rate > 0.0 && c.op.matrix().nnz() > 0)
    }
}

fn push(channels: &mut Vec<Channel>, rate: f64, op: Operator) {
    if rate > 0.0 {
        channels.push(Channel { rate, op });
    }
}

/// Single-photon signal loss, split into emission and absorption when the
/// bath is thermal.
pub fn signal_channels(params: &SystemParams, b: &Operator) -> Vec<Channel> {
    let mut out = Vec::new();
    push(&mut out, params.gamma_b * (params.nbar + 1.0), b.clone());
    push(&mut out, params.gamma_b * params.nbar, b.adjoint());
    out
}

/// Two-mode model `g(ab†² + a†b²) + iλ_a(a† - a)` on pump ⊗ signal, with
/// pump loss `γ_a` and signal loss `γ_b`.
pub fn build_full_model(params: &SystemParams, d_a: usize, d_b: usize) -> Result<LindbladModel> {
    params.validate()?;
    let spaces = [FockSpace::new(d_a)?, FockSpace::new(d_b)?];
    let a = embed(&annihilation(spaces[0]), 0, &spaces)?;
    let b = embed(&annihilation(spaces[1]), 1, &spaces)?;
    let (ad, bd) = (a.adjoint(), b.adjoint());

    let coupling = a.mul(&bd).mul(&bd).add(&ad.mul(&b).mul(&b)).scale_re(params.g);
    let drive = ad.sub(&a).scale(c64::new(0.0, params.lambda_a));
    let h = coupling.add(&drive);

    let mut channels = Vec::new();
    push(&mut channels, params.gamma_a, a);
    channels.extend(signal_channels(params, &b));
    LindbladModel::new(h, channels)
}

/// Signal-only model after eliminating the pump:
/// `H_b = (gλ_a/γ_a)(b² + b†²)`, single-photon loss `γ_b` and pair loss
/// `(κ + κ_e)/2` on `b²`.
///
/// The pair-loss rate is halved relative to the printed reduced equation so
/// that it is the rate the elimination actually produces under the dissipator
/// convention used throughout; the semiclassical amplitudes then reproduce
/// `N_b = λ_a/g` and `2gλ_a/(γ_a(κ + κ_e))`.
pub fn build_reduced_model(params: &SystemParams, d_b: usize) -> Result<LindbladModel> {
    params.validate()?;
    let h_coeff = params.two_photon_drive()?;
    let pair_rate = 0.5 * (params.kappa()? + params.kappa_e);
    let space = FockSpace::new(d_b)?;
    let b = annihilation(space);
    let b2 = b.mul(&b);
    let h = b2.add(&b2.adjoint()).scale_re(h_coeff);

    let mut channels = signal_channels(params, &b);
    push(&mut channels, pair_rate, b2);
    LindbladModel::new(h, channels)
}

/// Stable fixed point of the reduced semiclassical amplitude equation
/// `β̇ = -2ihβ* - κ'|β|²β - γ_bβ` with `h = gλ_a/γ_a`, `κ' = κ + κ_e`.
///
/// Returns 0 when the origin is the only stable solution.
pub fn reduced_fixed_point(params: &SystemParams) -> Result<c64> {
    let h = params.two_photon_drive()?;
    let kp = params.kappa()? + params.kappa_e;
    if h == 0.0 || kp == 0.0 {
        return Ok(c64::new(0.0, 0.0));
    }
    // |2ihβ*| = |β|(κ'|β|² + γ_b) fixes the modulus; the phase follows from
    // β² = -2ih|β|²/(κ'|β|² + γ_b).
    let n = (2.0 * h.abs() - params.gamma_b) / kp;
    if n <= 0.0 {
        return Ok(c64::new(0.0, 0.0));
    }
    let beta_sq = c64::new(0.0, -2.0 * h) * n / (kp * n + params.gamma_b);
    Ok(beta_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_model_structure() {
        let p = SystemParams { g: 0.3, lambda_a: 0.5, gamma_a: 1.0, gamma_b: 0.2, ..Default::default() };
        let m = build_full_model(&p, 4, 6).unwrap();
        assert_eq!(m.dims(), &[4, 6]);
        assert_eq!(m.channels().len(), 2);
        assert_eq!(m.channels()[0].rate, 1.0);
        assert!(m.hamiltonian().is_hermitian(1e-14));
    }

    #[test]
    fn thermal_bath_splits_signal_channel() {
        let p = SystemParams { nbar: 0.5, ..Default::default() };
        let m = build_reduced_model(&p, 5).unwrap();
        let rates: Vec<f64> = m.channels().iter().map(|c| c.rate).collect();
        assert_eq!(rates[..2], [1.5, 0.5]);
    }

    #[test]
    fn reduced_model_coefficients() {
        let p = SystemParams { g: 0.2, lambda_a: 0.01, gamma_a: 10.0, gamma_b: 1.0, kappa_e: 0.0, ..Default::default() };
        let m = build_reduced_model(&p, 4).unwrap();
        // ⟨2|H|0⟩ = √2 · gλ_a/γ_a
        let h20 = m.hamiltonian().matrix().get(2, 0).re;
        assert!((h20 - 2f64.sqrt() * 0.001 * 0.2).abs() < 1e-16);
        assert!((m.channels()[1].rate - 0.5 * 2.0 * 0.04 / 10.0).abs() < 1e-16);
    }

    #[test]
    fn reduced_model_needs_pump_loss() {
        let p = SystemParams { gamma_a: 0.0, ..Default::default() };
        assert!(build_reduced_model(&p, 4).is_err());
    }

    #[test]
    fn zero_coupling_reduced_model_is_pure_decay() {
        let p = SystemParams { g: 0.0, ..Default::default() };
        let m = build_reduced_model(&p, 4).unwrap();
        assert_eq!(m.hamiltonian().matrix().nnz(), 0);
        assert_eq!(m.channels().len(), 1);
    }

    #[test]
    fn fixed_point_matches_two_photon_amplitude() {
        let p = SystemParams { g: 0.1, lambda_a: 1.0, gamma_a: 10.0, gamma_b: 0.0, kappa_e: 0.1, ..Default::default() };
        let beta = reduced_fixed_point(&p).unwrap();
        let expected = 2.0 * 0.1 * 1.0 / (10.0 * (0.002 + 0.1));
        assert!((beta.norm_sqr() - expected).abs() < 1e-12);
        let h = p.two_photon_drive().unwrap();
        let kp = p.kappa().unwrap() + p.kappa_e;
        let rhs = c64::new(0.0, -2.0 * h) * beta.conj() - beta * (kp * beta.norm_sqr());
        assert!(rhs.norm() < 1e-14);
    }
}
