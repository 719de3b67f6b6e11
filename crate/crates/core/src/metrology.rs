//! Quantum Fisher information and error-propagation uncertainties for the
//! coupling `g`.
//!
//! Parameter derivatives are central differences at steps `h` and `h/2`
//! combined by one Richardson level.

use faer::{c64, Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, embed, expectation, number, DensityMatrix, FockSpace, Operator, StateVector};

/// Mean, variance and `∂⟨M⟩/∂g` of a measured observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub mean: f64,
    pub variance: f64,
    pub dmean_dg: f64,
}

impl MeasurementRecord {
    /// Roundoff-level negative variances are clamped to zero.
    pub fn new(mean: f64, variance: f64, dmean_dg: f64) -> Result<Self> {
        let slack = 1e-12 * (1.0 + mean * mean);
        if !variance.is_finite() || variance < -slack {
            return Err(Error::InvalidParameter { name: "variance", reason: format!("{variance} is negative") });
        }
        Ok(Self { mean, variance: variance.max(0.0), dmean_dg })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QfiMethod {
    Pure,
    Gaussian,
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    pub value: f64,
    pub method: QfiMethod,
    /// Finite-difference step, zero when derivatives were supplied.
    pub fd_step: f64,
}

/// `10⁻⁴ max(|g|, 1)`.
pub fn default_step(g: f64) -> f64 {
    1e-4 * g.abs().max(1.0)
}

fn check_step(step: f64) -> Result<()> {
    if step.is_finite() && step > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "step", reason: format!("{step} is not a positive number") })
    }
}

/// Richardson-extrapolated central difference of a vector-valued function.
fn derivative<F>(f: &F, g: f64, h: f64) -> Result<Vec<c64>>
where
    F: Fn(f64) -> Result<Vec<c64>>,
{
    let central = |h: f64| -> Result<Vec<c64>> {
        let (up, down) = (f(g + h)?, f(g - h)?);
        if up.len() != down.len() {
            return Err(Error::DimensionMismatch { expected: up.len(), found: down.len() });
        }
        Ok(up.iter().zip(&down).map(|(u, d)| (u - d) / (2.0 * h)).collect())
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok(fine.iter().zip(&coarse).map(|(f, c)| (f * 4.0 - c) / 3.0).collect())
}

fn scalar_derivative<F>(f: &F, g: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let v = derivative(&|x| Ok(vec![c64::new(f(x)?, 0.0)]), g, h)?;
    Ok(v[0].re)
}

/// `F = 4(⟨∂ψ|∂ψ⟩ - |⟨ψ|∂ψ⟩|²)` for a family of pure states.
pub fn qfi_pure<F>(family: F, g: f64, step: f64) -> Result<QfiResult>
where
    F: Fn(f64) -> Result<StateVector>,
{
    check_step(step)?;
    let checked = |x: f64| -> Result<StateVector> {
        let psi = family(x)?;
        let n = psi.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(n));
        }
        Ok(psi)
    };
    let psi = checked(g)?;
    let dpsi = derivative(&|x| Ok(checked(x)?.amplitudes().to_vec()), g, step)?;
    let norm2: f64 = dpsi.iter().map(|v| v.norm_sqr()).sum();
    let overlap: c64 = psi.amplitudes().iter().zip(&dpsi).map(|(a, d)| a.conj() * d).sum();
    let value = 4.0 * (norm2 - overlap.norm_sqr());
    Ok(QfiResult { value: value.max(0.0), method: QfiMethod::Pure, fd_step: step })
}

/// First and second moments of one mode in the quadratures
/// `q = (b - b†)/(i√2)`, `p = (b + b†)/√2`, ordered `(q, p)`.
///
/// The covariance is the symmetrized one, `C = I/2` for vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMoments {
    pub displacement: [f64; 2],
    pub covariance: [[f64; 2]; 2],
    /// `√det C`.
    pub d: f64,
}

/// Parameter derivatives of [`GaussianMoments`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianDerivative {
    pub displacement: [f64; 2],
    pub covariance: [[f64; 2]; 2],
    pub d: f64,
}

fn det2(c: &[[f64; 2]; 2]) -> f64 {
    c[0][0] * c[1][1] - c[0][1] * c[1][0]
}

impl GaussianMoments {
    /// Validates symmetry and the uncertainty relation `det C ≥ 1/4`.
    pub fn new(displacement: [f64; 2], covariance: [[f64; 2]; 2], tol: f64) -> Result<Self> {
        let scale = covariance.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        if (covariance[0][1] - covariance[1][0]).abs() > tol * scale {
            return Err(Error::InvalidParameter { name: "covariance", reason: "not symmetric".into() });
        }
        let det = det2(&covariance);
        if !(det >= 0.25 - tol * scale * scale) {
            return Err(Error::InvalidParameter {
                name: "covariance",
                reason: format!("det C = {det} violates the uncertainty relation"),
            });
        }
        Ok(Self { displacement, covariance, d: det.max(0.0).sqrt() })
    }

    /// Moments of mode `slot` of `rho`, built from `⟨b⟩`, `⟨b²⟩` and
    /// `⟨b†b⟩` so that the truncated commutator never enters.
    pub fn of_mode(rho: &DensityMatrix, slot: usize) -> Result<Self> {
        let (b, n) = mode_ops(rho.dims(), slot)?;
        let mean_b = expectation(&b, rho)?;
        let mean_b2 = expectation(&b.mul(&b), rho)?;
        let occ = expectation(&n, rho)?.re - mean_b.norm_sqr();
        let anom = mean_b2 - mean_b * mean_b;
        let s2 = 2f64.sqrt();
        let displacement = [s2 * mean_b.im, s2 * mean_b.re];
        let covariance = [[occ + 0.5 - anom.re, anom.im], [anom.im, occ + 0.5 + anom.re]];
        Self::new(displacement, covariance, 1e-9)
    }

    fn flatten(&self) -> Vec<c64> {
        let c = &self.covariance;
        [self.displacement[0], self.displacement[1], c[0][0], c[0][1], c[1][1], self.d]
            .iter()
            .map(|&v| c64::new(v, 0.0))
            .collect()
    }
}

/// Finite-difference derivative of a family of Gaussian moments.
pub fn gaussian_derivative<F>(family: F, g: f64, step: f64) -> Result<GaussianDerivative>
where
    F: Fn(f64) -> Result<GaussianMoments>,
{
    check_step(step)?;
    let v = derivative(&|x| Ok(family(x)?.flatten()), g, step)?;
    let r: Vec<f64> = v.iter().map(|z| z.re).collect();
    Ok(GaussianDerivative { displacement: [r[0], r[1]], covariance: [[r[2], r[3]], [r[3], r[4]]], d: r[5] })
}

/// Gaussian QFI
/// `2d²/(4d²+1) Tr[(C⁻¹∂C)²] + 8(∂d)²/(16d⁴-1) + ∂Xᵀ C⁻¹ ∂X`.
///
/// For pure states `16d⁴ = 1` and the middle term is taken as zero provided
/// `∂d` vanishes too.
pub fn qfi_gaussian(m: &GaussianMoments, dm: &GaussianDerivative) -> Result<QfiResult> {
    let c = &m.covariance;
    let det = det2(c);
    if det.abs() < 1e-300 || !det.is_finite() {
        return Err(Error::SingularCovariance);
    }
    let inv = [[c[1][1] / det, -c[0][1] / det], [-c[1][0] / det, c[0][0] / det]];
    let dc = &dm.covariance;
    let mut p = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            p[i][j] = inv[i][0] * dc[0][j] + inv[i][1] * dc[1][j];
        }
    }
    let tr_p2 = p[0][0] * p[0][0] + 2.0 * p[0][1] * p[1][0] + p[1][1] * p[1][1];
    let d = m.d;
    let first = 2.0 * d * d / (4.0 * d * d + 1.0) * tr_p2;

    let purity_gap = 16.0 * d.powi(4) - 1.0;
    let middle = if purity_gap.abs() < 1e-9 {
        if dm.d.abs() > 1e-6 {
            return Err(Error::Divergent("Gaussian mixedness term"));
        }
        0.0
    } else {
        8.0 * dm.d * dm.d / purity_gap
    };

    let x = &dm.displacement;
    let disp = x[0] * (inv[0][0] * x[0] + inv[0][1] * x[1]) + x[1] * (inv[1][0] * x[0] + inv[1][1] * x[1]);
    let value = first + middle + disp;
    Ok(QfiResult { value: value.max(0.0), method: QfiMethod::Gaussian, fd_step: 0.0 })
}

/// Spectral QFI of a density-matrix family.
///
/// Evaluated in the eigenbasis `{|k⟩, E_k}` of `ρ(g)` as
/// `Σ 2|⟨k|∂ρ|k'⟩|²/(E_k + E_k')`, which is the eigenvalue term
/// `Σ (∂E_k)²/E_k` plus the coherence term
/// `Σ 2(E_k - E_k')²/(E_k + E_k')·|⟨k|∂k'⟩|²` without differentiating
/// eigenvectors. Diagonal terms need `E_k > eigen_floor`, pairs
/// `E_k + E_k' > eigen_floor`.
pub fn qfi_spectral<F>(family: F, g: f64, step: f64, eigen_floor: f64) -> Result<QfiResult>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    check_step(step)?;
    if !(eigen_floor >= 0.0) {
        return Err(Error::InvalidParameter { name: "eigen_floor", reason: format!("{eigen_floor} is negative") });
    }
    let rho = family(g)?;
    let d = rho.dim();
    let flat = derivative(&|x| Ok(family(x)?.to_vec()), g, step)?;
    let drho = DensityMatrix::from_vec(&flat, rho.dims())?;
    let drho = drho.hermitian_part();

    let eig = rho.hermitian_part().self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenFailure)?;
    let u = eig.U();
    let e: Vec<f64> = (0..d).map(|k| eig.S().column_vector()[k].re.max(0.0)).collect();
    let b: Mat<c64> = u.adjoint() * &drho * u;

    let mut value = 0.0;
    for k in 0..d {
        for kp in 0..d {
            let s = e[k] + e[kp];
            let keep = if k == kp { e[k] > eigen_floor } else { s > eigen_floor };
            if keep && s > 0.0 {
                value += 2.0 * b[(k, kp)].norm_sqr() / s;
            }
        }
    }
    Ok(QfiResult { value, method: QfiMethod::Spectral, fd_step: step })
}

/// `δ²g = Var(M)/(∂⟨M⟩/∂g)²`.
pub fn error_propagation(rec: &MeasurementRecord) -> Result<f64> {
    if rec.dmean_dg == 0.0 || !rec.dmean_dg.is_finite() {
        return Err(Error::DivergentUncertainty);
    }
    Ok(rec.variance / (rec.dmean_dg * rec.dmean_dg))
}

fn mode_ops(dims: &[usize], slot: usize) -> Result<(Operator, Operator)> {
    if slot >= dims.len() {
        return Err(Error::DimensionMismatch { expected: dims.len(), found: slot + 1 });
    }
    let spaces = dims.iter().map(|&d| FockSpace::new(d)).collect::<Result<Vec<_>>>()?;
    Ok((embed(&annihilation(spaces[slot]), slot, &spaces)?, embed(&number(spaces[slot]), slot, &spaces)?))
}

fn record<F, S>(family: F, g: f64, step: f64, stats: S) -> Result<MeasurementRecord>
where
    F: Fn(f64) -> Result<DensityMatrix>,
    S: Fn(&DensityMatrix) -> Result<(f64, f64)>,
{
    check_step(step)?;
    let (mean, second) = stats(&family(g)?)?;
    let dmean = scalar_derivative(&|x| Ok(stats(&family(x)?)?.0), g, step)?;
    MeasurementRecord::new(mean, second - mean * mean, dmean)
}

/// Photon counting `M = b†b` on mode `slot`.
pub fn photon_stats<F>(family: F, g: f64, step: f64, slot: usize) -> Result<MeasurementRecord>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    record(family, g, step, |rho| {
        let (_, n) = mode_ops(rho.dims(), slot)?;
        Ok((expectation(&n, rho)?.re, expectation(&n.mul(&n), rho)?.re))
    })
}

/// Homodyne detection `M = b e^{-iφ} + b† e^{iφ}` on mode `slot`, with
/// `⟨M²⟩ = 2Re(e^{-2iφ}⟨b²⟩) + 2⟨b†b⟩ + 1`.
pub fn homodyne_stats<F>(family: F, g: f64, step: f64, slot: usize, phi: f64) -> Result<MeasurementRecord>
where
    F: Fn(f64) -> Result<DensityMatrix>,
{
    let phase = c64::from_polar(1.0, -phi);
    record(family, g, step, |rho| {
        let (b, n) = mode_ops(rho.dims(), slot)?;
        let mean_b = expectation(&b, rho)?;
        let mean_b2 = expectation(&b.mul(&b), rho)?;
        let mean = 2.0 * (phase * mean_b).re;
        let second = 2.0 * (phase * phase * mean_b2).re + 2.0 * expectation(&n, rho)?.re + 1.0;
        Ok((mean, second))
    })
}
