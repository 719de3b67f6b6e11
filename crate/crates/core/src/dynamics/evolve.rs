use faer::c64;

use super::liouvillian::liouvillian;
use super::model::LindbladModel;
use crate::error::{Error, Result};
use crate::hilbert::{annihilation, embed, DensityMatrix, FockSpace, Operator, StateVector};
use crate::ode::{integrate, Tolerances};

/// The `g`-independent down-conversion generator `G = ab†² + a†b²` on
/// pump ⊗ signal. Closed evolution at coupling `g` for time `t` is
/// `exp(-i g t G)`.
pub fn pdc_generator(d_a: usize, d_b: usize) -> Result<Operator> {
    let spaces = [FockSpace::new(d_a)?, FockSpace::new(d_b)?];
    let a = embed(&annihilation(spaces[0]), 0, &spaces)?;
    let b = embed(&annihilation(spaces[1]), 1, &spaces)?;
    let bd = b.adjoint();
    Ok(a.mul(&bd).mul(&bd).add(&a.adjoint().mul(&b).mul(&b)))
}

/// `exp(-iHt)|ψ₀⟩` by adaptive integration of the Schrödinger equation.
pub fn evolve_closed(h: &Operator, psi0: &StateVector, t: f64, tol: Tolerances) -> Result<StateVector> {
    let scale = h.matrix().max_abs().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * scale {
        return Err(Error::NonHermitian(defect));
    }
    if h.dims() != psi0.dims() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: psi0.dim() });
    }
    let m = h.matrix();
    let minus_i = c64::new(0.0, -1.0);
    let (psi, _) = integrate(
        |_, y, dy| {
            m.matvec_into(y, dy);
            dy.iter_mut().for_each(|v| *v *= minus_i);
        },
        0.0,
        t,
        psi0.amplitudes(),
        tol,
    )?;
    let out = StateVector::new(psi, psi0.dims().to_vec(), f64::INFINITY)?;
    let drift = (out.norm() - psi0.norm()).abs();
    if drift > 1e3 * tol.rtol.max(tol.atol) {
        return Err(Error::IntegratorFailure { t, reason: format!("norm drifted by {drift:.3e}") });
    }
    Ok(out)
}

/// `ρ(t)` under the model's master equation.
pub fn evolve_open(model: &LindbladModel, rho0: &DensityMatrix, t: f64, tol: Tolerances) -> Result<DensityMatrix> {
    Ok(evolve_open_trajectory(model, rho0, &[t], tol)?.pop().expect("one time requested"))
}

/// States at each of the ascending `times`, integrating continuously.
pub fn evolve_open_trajectory(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<DensityMatrix>> {
    if rho0.dims() != model.dims() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: rho0.dim() });
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter { name: "times", reason: "must be non-negative and ascending".into() });
    }
    let l = liouvillian(model);
    let mut y = rho0.to_vec();
    let mut t_prev = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let (next, _) = integrate(|_, y, dy| l.matvec_into(y, dy), t_prev, t, &y, tol)?;
        y = next;
        t_prev = t;
        out.push(DensityMatrix::from_vec(&y, model.dims())?);
    }
    Ok(out)
}
