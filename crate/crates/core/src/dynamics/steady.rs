use faer::c64;
use faer::linalg::solvers::Solve;
use faer::Mat;
use serde::{Deserialize, Serialize};

use super::evolve::evolve_open;
use super::liouvillian::{liouvillian, vec_index};
use super::model::{build_reduced_model, reduced_fixed_point, LindbladModel};
use super::params::SystemParams;
use crate::error::{Error, Result};
use crate::hilbert::{coherent_state, coherent_truncation, DensityMatrix, FockSpace, StateVector};
use crate::ode::Tolerances;
use crate::sparse::CsrMatrix;

/// Superoperator size up to which a dense rank check is affordable.
const DENSE_RANK_LIMIT: usize = 1600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteadyMethod {
    NullSpace,
    LongTime,
}

#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    /// `max |L[ρ]|` entrywise.
    pub residual: f64,
    pub method: SteadyMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyTolerances {
    pub residual: f64,
    pub integrator: Tolerances,
    /// Longest evolution attempted by the long-time fallback.
    pub max_time: f64,
}

impl Default for SteadyTolerances {
    fn default() -> Self {
        Self { residual: 1e-9, integrator: Tolerances { rtol: 1e-10, atol: 1e-13 }, max_time: 1e6 }
    }
}

fn residual(l: &CsrMatrix, rho: &DensityMatrix) -> f64 {
    l.matvec(&rho.to_vec()).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Hermitian, unit-trace density matrix from a raw null vector.
fn normalize(x: &[c64], dims: &[usize]) -> Option<DensityMatrix> {
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return None;
    }
    let raw = DensityMatrix::from_vec(x, dims).ok()?;
    let tr = raw.trace();
    if tr.norm() < 1e-300 {
        return None;
    }
    let h = raw.hermitian_part();
    let d = h.nrows();
    let m = Mat::<c64>::from_fn(d, d, |i, j| h[(i, j)] / tr.re);
    DensityMatrix::from_matrix_unchecked(m, dims.to_vec()).ok()
}

/// Solves `L x = e_k` after replacing row `k = vec_index(level, level)` by the
/// trace functional.
fn bordered_solve(l: &CsrMatrix, d: usize, level: usize) -> Option<Vec<c64>> {
    let k = vec_index(level, level, d);
    let n = l.nrows();
    let entries = l
        .iter()
        .filter(|&(i, _, _)| i != k)
        .chain((0..d).map(|m| (k, vec_index(m, m, d), c64::new(1.0, 0.0))))
        .collect::<Vec<_>>();
    let a = CsrMatrix::from_triplets(n, n, entries).to_faer();
    let lu = a.sp_lu().ok()?;
    let mut rhs = Mat::<c64>::zeros(n, 1);
    rhs[(k, 0)] = c64::new(1.0, 0.0);
    lu.solve_in_place(rhs.as_mut());
    Some((0..n).map(|i| rhs[(i, 0)]).collect())
}

/// Number of singular values of `L` below `rel·σ_max`.
fn null_dimension(l: &CsrMatrix, rel: f64) -> Result<usize> {
    let sv = l.to_dense().singular_values().map_err(|_| Error::EigenFailure)?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s <= rel * smax).count())
}

/// Stationary state of the model.
///
/// The vectorized Liouvillian is factorized with one diagonal row swapped for
/// the trace constraint. Two different swapped rows must give the same state;
/// if they do not, the null space is either degenerate (reported as
/// [`Error::NonUniqueSteadyState`]) or ill-conditioned, in which case the
/// state is obtained by long-time evolution instead.
pub fn steady_state(model: &LindbladModel, tol: SteadyTolerances) -> Result<SteadyStateResult> {
    if !model.is_dissipative() {
        return Err(Error::NoDissipation);
    }
    let d = model.dim();
    let dims = model.dims();
    let l = liouvillian(model);

    let first = bordered_solve(&l, d, 0).and_then(|x| normalize(&x, dims));
    let second = if d > 1 { bordered_solve(&l, d, d - 1).and_then(|x| normalize(&x, dims)) } else { first.clone() };

    if let (Some(r1), Some(r2)) = (&first, &second) {
        let res = residual(&l, r1);
        let spread = r1.trace_distance(r2)?;
        if res <= tol.residual && spread <= tol.residual.sqrt() {
            return Ok(SteadyStateResult { rho: r1.clone(), residual: res, method: SteadyMethod::NullSpace });
        }
    }

    if l.nrows() <= DENSE_RANK_LIMIT {
        let k = null_dimension(&l, 1e-11)?;
        if k > 1 {
            return Err(Error::NonUniqueSteadyState(k));
        }
    }
    let seed = DensityMatrix::pure(&StateVector::vacuum(dims));
    relax_to_steady_state(model, &seed, tol)
}

/// Evolves `rho0` in growing time windows until `max |L[ρ]|` drops below the
/// residual tolerance.
pub fn relax_to_steady_state(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    tol: SteadyTolerances,
) -> Result<SteadyStateResult> {
    if !model.is_dissipative() {
        return Err(Error::NoDissipation);
    }
    let l = liouvillian(model);
    let slowest = model
        .channels()
        .iter()
        .map(|c| c.rate)
        .filter(|&r| r > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut window = 1.0 / slowest;
    let mut elapsed = 0.0;
    let mut rho = rho0.clone();
    let mut res = residual(&l, &rho);
    while res > tol.residual {
        if elapsed >= tol.max_time {
            return Err(Error::SteadyStateFailure { residual: res, tol: tol.residual });
        }
        let step = window.min(tol.max_time - elapsed);
        rho = evolve_open(model, &rho, step, tol.integrator)?;
        elapsed += step;
        window *= 2.0;
        res = residual(&l, &rho);
    }
    Ok(SteadyStateResult { rho, residual: res, method: SteadyMethod::LongTime })
}

/// Truncation at which the coherent state at the reduced semiclassical fixed
/// point has norm deficit below `limit`.
pub fn lossless_signal_dim(params: &SystemParams, limit: f64) -> Result<usize> {
    Ok(coherent_truncation(reduced_fixed_point(params)?, limit).max(2))
}

/// Steady state of the reduced model without single-photon signal loss.
///
/// Photon-number parity is conserved there, so the stationary state is not
/// unique; this returns the one reached by relaxing the coherent state at the
/// semiclassical fixed point, which is itself stationary up to truncation.
pub fn lossless_signal_steady_state(params: &SystemParams, dim: usize, tol: SteadyTolerances) -> Result<SteadyStateResult> {
    if params.gamma_b != 0.0 || params.nbar != 0.0 {
        return Err(Error::OutOfRegime { regime: "lossless signal", reason: "needs gamma_b = 0".into() });
    }
    let model = build_reduced_model(params, dim)?;
    let seed = DensityMatrix::pure(&coherent_state(reduced_fixed_point(params)?, FockSpace::new(dim)?)?);
    relax_to_steady_state(&model, &seed, tol)
}

/// `-max{Re λ : Re λ < -ε}` over the Liouvillian spectrum, with the zero-mode
/// threshold `ε = 1e-10 ‖L‖∞`.
pub fn spectral_gap(model: &LindbladModel) -> Result<f64> {
    let l = liouvillian(model);
    let eps = 1e-10 * l.norm_inf();
    let ev = l.to_dense().eigenvalues().map_err(|_| Error::EigenFailure)?;
    let slowest = ev.iter().map(|e| e.re).filter(|&r| r < -eps).fold(f64::NEG_INFINITY, f64::max);
    if slowest.is_finite() {
        Ok(-slowest)
    } else {
        Err(Error::NoDissipation)
    }
}

/// Gap at truncation `d`, checked against `d + step`; a relative change above
/// 1% is reported as non-convergence.
pub fn spectral_gap_converged<F>(build: F, d: usize, step: usize) -> Result<f64>
where
    F: Fn(usize) -> Result<LindbladModel>,
{
    let lo = spectral_gap(&build(d)?)?;
    let hi = spectral_gap(&build(d + step)?)?;
    let rel_change = (hi - lo).abs() / hi.abs().max(f64::MIN_POSITIVE);
    if rel_change > 0.01 {
        return Err(Error::TruncationNotConverged { what: "spectral gap", rel_change });
    }
    Ok(hi)
}
