//! Vectorized Lindblad generator.
//!
//! Density matrices are column-stacked, `vec(ρ)[i + j·d] = ρ_ij`, so that
//! `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`.

use faer::c64;

use super::model::LindbladModel;
use crate::sparse::CsrMatrix;

/// `L` with `vec(ρ̇) = L vec(ρ)` for
/// `ρ̇ = -i[H, ρ] + Σ γ (2cρc† - c†cρ - ρc†c)`.
pub fn liouvillian(model: &LindbladModel) -> CsrMatrix {
    let h = model.hamiltonian().matrix();
    let id = CsrMatrix::identity(h.nrows());
    let minus_i = c64::new(0.0, -1.0);

    let mut l = id.kron(h).sub(&h.transpose().kron(&id)).scale(minus_i);
    for ch in model.channels() {
        let c = ch.op.matrix();
        let cdc = c.adjoint().matmul(c);
        let term = c
            .conj()
            .kron(c)
            .scale(c64::new(2.0, 0.0))
            .sub(&id.kron(&cdc))
            .sub(&cdc.transpose().kron(&id));
        l = l.add(&term.scale(c64::new(ch.rate, 0.0)));
    }
    l
}

/// Index of `ρ_ij` in the column-stacked vector.
pub fn vec_index(i: usize, j: usize, d: usize) -> usize {
    i + j * d
}
