//! Truncated bosonic Fock spaces, mode operators and states.
//!
//! Composite spaces are ordered lists of mode dimensions. In the two-mode
//! model the pump mode always comes first and the signal mode second, and the
//! basis index of `|n_pump, n_signal⟩` is `n_pump * d_signal + n_signal`.

use faer::{c64, Mat, Side};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Largest tolerated norm deficit of a truncated coherent state.
pub const COHERENT_NORM_DEFICIT: f64 = 1e-10;

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
const ONE: c64 = c64 { re: 1.0, im: 0.0 };

/// Fock levels `|0⟩ … |dim-1⟩` of a single bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter { name: "dim", reason: "a Fock space needs at least one level".into() });
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// A linear operator on a (possibly composite) truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: CsrMatrix,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(matrix: CsrMatrix, dims: Vec<usize>) -> Result<Self> {
        let n = total_dim(&dims);
        if !matrix.is_square() || matrix.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows() });
        }
        Ok(Self { matrix, dims })
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self { matrix: CsrMatrix::identity(total_dim(dims)), dims: dims.to_vec() }
    }

    pub fn zero(dims: &[usize]) -> Self {
        let n = total_dim(dims);
        Self { matrix: CsrMatrix::zeros(n, n), dims: dims.to_vec() }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), dims: self.dims.clone() }
    }

    pub fn scale(&self, s: c64) -> Self {
        Self { matrix: self.matrix.scale(s), dims: self.dims.clone() }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims, "operators act on different spaces");
        Self { matrix: self.matrix.add(&other.matrix), dims: self.dims.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims, "operators act on different spaces");
        Self { matrix: self.matrix.sub(&other.matrix), dims: self.dims.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims, "operators act on different spaces");
        Self { matrix: self.matrix.matmul(&other.matrix), dims: self.dims.clone() }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(&self.dims), |acc, _| acc.mul(self))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Tensor product with the mode order `self` then `other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        Self { matrix: self.matrix.kron(&other.matrix), dims }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.matrix.hermiticity_defect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        check_dims(&self.dims, &psi.dims)?;
        Ok(StateVector { amplitudes: self.matrix.matvec(&psi.amplitudes), dims: self.dims.clone() })
    }

    pub fn to_dense(&self) -> Mat<c64> {
        self.matrix.to_dense()
    }
}

fn check_dims(expected: &[usize], found: &[usize]) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected: total_dim(expected), found: total_dim(found) });
    }
    Ok(())
}

/// Annihilation operator with `⟨n-1|a|n⟩ = √n`.
pub fn annihilation(space: FockSpace) -> Operator {
    let d = space.dim();
    let m = CsrMatrix::from_triplets(d, d, (1..d).map(|n| (n - 1, n, c64::new((n as f64).sqrt(), 0.0))));
    Operator { matrix: m, dims: vec![d] }
}

pub fn creation(space: FockSpace) -> Operator {
    annihilation(space).adjoint()
}

/// Number operator, diagonal `0, 1, …, dim-1` exactly.
pub fn number(space: FockSpace) -> Operator {
    let d = space.dim();
    let m = CsrMatrix::from_triplets(d, d, (1..d).map(|n| (n, n, c64::new(n as f64, 0.0))));
    Operator { matrix: m, dims: vec![d] }
}

/// Lifts a single-mode operator into `spaces`, acting on `spaces[slot]` and as
/// the identity elsewhere.
pub fn embed(op: &Operator, slot: usize, spaces: &[FockSpace]) -> Result<Operator> {
    let target = spaces.get(slot).ok_or(Error::InvalidParameter {
        name: "slot",
        reason: format!("slot {slot} out of range for {} modes", spaces.len()),
    })?;
    if op.dims() != [target.dim()] {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: op.dim() });
    }
    let mut acc: Option<Operator> = None;
    for (k, s) in spaces.iter().enumerate() {
        let factor = if k == slot { op.clone() } else { Operator::identity(&[s.dim()]) };
        acc = Some(match acc {
            None => factor,
            Some(a) => a.tensor(&factor),
        });
    }
    Ok(acc.expect("at least one mode"))
}

/// A pure state on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<c64>,
    dims: Vec<usize>,
}

impl StateVector {
    /// Wraps amplitudes, rejecting vectors whose norm differs from 1 by more than `tol`.
    pub fn new(amplitudes: Vec<c64>, dims: Vec<usize>, tol: f64) -> Result<Self> {
        if amplitudes.len() != total_dim(&dims) {
            return Err(Error::DimensionMismatch { expected: total_dim(&dims), found: amplitudes.len() });
        }
        let s = Self { amplitudes, dims };
        let norm = s.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized(norm));
        }
        Ok(s)
    }

    pub fn fock(space: FockSpace, n: usize) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::InsufficientTruncation { dim: space.dim(), deficit: 1.0, limit: 0.0 });
        }
        let mut amps = vec![ZERO; space.dim()];
        amps[n] = ONE;
        Ok(Self { amplitudes: amps, dims: vec![space.dim()] })
    }

    pub fn vacuum(dims: &[usize]) -> Self {
        let mut amps = vec![ZERO; total_dim(dims)];
        amps[0] = ONE;
        Self { amplitudes: amps, dims: dims.to_vec() }
    }

    pub fn amplitudes(&self) -> &[c64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> c64 {
        assert_eq!(self.dims, other.dims, "states live on different spaces");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        Self { amplitudes: amps, dims }
    }
}

/// Norm deficit `1 - Σ_{n<dim} |⟨n|α⟩|²` of the untruncated coherent state.
pub fn coherent_norm_deficit(alpha: c64, dim: usize) -> f64 {
    let x = alpha.norm_sqr();
    // 1 - e^{-x} Σ_{n<dim} x^n/n! summed from the tail for accuracy.
    let mut term = (-x).exp();
    let mut kept = 0.0;
    for n in 0..dim {
        if n > 0 {
            term *= x / n as f64;
        }
        kept += term;
    }
    let mut tail = 0.0;
    let mut t = term;
    let mut n = dim;
    loop {
        t *= x / n as f64;
        tail += t;
        if t < 1e-300 || (t < tail * 1e-17 && n as f64 > x) {
            break;
        }
        n += 1;
    }
    if tail > 0.0 { tail } else { (1.0 - kept).max(0.0) }
}

/// Coherent state `|α⟩` truncated to `space`, renormalized after truncation.
pub fn coherent_state(alpha: c64, space: FockSpace) -> Result<StateVector> {
    let d = space.dim();
    let deficit = coherent_norm_deficit(alpha, d);
    if deficit > COHERENT_NORM_DEFICIT {
        return Err(Error::InsufficientTruncation { dim: d, deficit, limit: COHERENT_NORM_DEFICIT });
    }
    let mut amps = Vec::with_capacity(d);
    let mut c = c64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amps.push(c);
    for n in 1..d {
        c = c * alpha / (n as f64).sqrt();
        amps.push(c);
    }
    Ok(StateVector { amplitudes: amps, dims: vec![d] }.normalized())
}

/// A density matrix on a truncated space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: Mat<c64>,
    dims: Vec<usize>,
}

/// Diagnostics of the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateHealth {
    pub trace_error: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

impl StateHealth {
    pub fn within(&self, trace_tol: f64, herm_tol: f64, pos_tol: f64) -> bool {
        self.trace_error <= trace_tol && self.hermiticity_defect <= herm_tol && self.min_eigenvalue >= -pos_tol
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at tolerance `tol`.
    pub fn new(matrix: Mat<c64>, dims: Vec<usize>, tol: f64) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix, dims)?;
        let h = rho.health()?;
        if h.hermiticity_defect > tol {
            return Err(Error::NonHermitian(h.hermiticity_defect));
        }
        if h.trace_error > tol {
            return Err(Error::NotNormalized(rho.trace().re));
        }
        if h.min_eigenvalue < -tol {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("negative eigenvalue {:.3e}", h.min_eigenvalue),
            });
        }
        Ok(rho)
    }

    pub fn from_matrix_unchecked(matrix: Mat<c64>, dims: Vec<usize>) -> Result<Self> {
        let n = total_dim(&dims);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows() });
        }
        Ok(Self { matrix, dims })
    }

    pub fn pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        let m = Mat::<c64>::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj());
        Self { matrix: m, dims: psi.dims().to_vec() }
    }

    /// Column-stacked vectorization `vec(ρ)[i + j·d] = ρ_ij`.
    pub fn to_vec(&self) -> Vec<c64> {
        let d = self.dim();
        let mut v = Vec::with_capacity(d * d);
        for j in 0..d {
            for i in 0..d {
                v.push(self.matrix[(i, j)]);
            }
        }
        v
    }

    pub fn from_vec(v: &[c64], dims: &[usize]) -> Result<Self> {
        let d = total_dim(dims);
        if v.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, found: v.len() });
        }
        let m = Mat::<c64>::from_fn(d, d, |i, j| v[i + j * d]);
        Ok(Self { matrix: m, dims: dims.to_vec() })
    }

    pub fn matrix(&self) -> &Mat<c64> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..=i {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let herm = self.hermitian_part();
        let ev = herm.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::EigenFailure)?;
        Ok(ev)
    }

    pub fn hermitian_part(&self) -> Mat<c64> {
        let d = self.dim();
        Mat::<c64>::from_fn(d, d, |i, j| (self.matrix[(i, j)] + self.matrix[(j, i)].conj()) * 0.5)
    }

    pub fn health(&self) -> Result<StateHealth> {
        let ev = self.eigenvalues()?;
        Ok(StateHealth {
            trace_error: (self.trace() - ONE).norm(),
            hermiticity_defect: self.hermiticity_defect(),
            min_eigenvalue: ev.first().copied().unwrap_or(0.0),
        })
    }

    /// Population of basis state `k`.
    pub fn population(&self, k: usize) -> f64 {
        self.matrix[(k, k)].re
    }

    /// Marginal populations of mode `slot`.
    pub fn mode_populations(&self, slot: usize) -> Vec<f64> {
        let d_slot = self.dims[slot];
        let inner: usize = self.dims[slot + 1..].iter().product();
        let mut pops = vec![0.0; d_slot];
        for k in 0..self.dim() {
            pops[(k / inner) % d_slot] += self.matrix[(k, k)].re;
        }
        pops
    }

    /// Partial trace keeping only mode `slot`.
    pub fn reduce_to(&self, slot: usize) -> DensityMatrix {
        let d_slot = self.dims[slot];
        let inner: usize = self.dims[slot + 1..].iter().product();
        let outer: usize = self.dims[..slot].iter().product();
        let mut m = Mat::<c64>::zeros(d_slot, d_slot);
        for o in 0..outer {
            for r in 0..inner {
                for i in 0..d_slot {
                    for j in 0..d_slot {
                        let ki = (o * d_slot + i) * inner + r;
                        let kj = (o * d_slot + j) * inner + r;
                        m[(i, j)] += self.matrix[(ki, kj)];
                    }
                }
            }
        }
        DensityMatrix { matrix: m, dims: vec![d_slot] }
    }

    /// Trace distance `½‖ρ - σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        check_dims(&self.dims, &other.dims)?;
        let d = self.dim();
        let diff = Mat::<c64>::from_fn(d, d, |i, j| {
            let a = self.matrix[(i, j)] - other.matrix[(i, j)];
            let b = (self.matrix[(j, i)] - other.matrix[(j, i)]).conj();
            (a + b) * 0.5
        });
        let ev = diff.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::EigenFailure)?;
        Ok(0.5 * ev.iter().map(|e| e.abs()).sum::<f64>())
    }
}

/// Anything an observable can be averaged over.
pub trait QuantumState {
    fn state_dims(&self) -> &[usize];
    /// `⟨ψ|O|ψ⟩` or `Tr(ρO)` without dimension checks.
    fn expect_unchecked(&self, op: &CsrMatrix) -> c64;
}

impl QuantumState for StateVector {
    fn state_dims(&self) -> &[usize] {
        &self.dims
    }

    fn expect_unchecked(&self, op: &CsrMatrix) -> c64 {
        let mut acc = ZERO;
        for (i, j, v) in op.iter() {
            acc += self.amplitudes[i].conj() * v * self.amplitudes[j];
        }
        acc
    }
}

impl QuantumState for DensityMatrix {
    fn state_dims(&self) -> &[usize] {
        &self.dims
    }

    fn expect_unchecked(&self, op: &CsrMatrix) -> c64 {
        // Tr(ρO) = Σ_ij O_ij ρ_ji
        let mut acc = ZERO;
        for (i, j, v) in op.iter() {
            acc += v * self.matrix[(j, i)];
        }
        acc
    }
}

/// Expectation value of `op` in `state`.
pub fn expectation<S: QuantumState + ?Sized>(op: &Operator, state: &S) -> Result<c64> {
    check_dims(op.dims(), state.state_dims())?;
    Ok(state.expect_unchecked(op.matrix()))
}

/// Smallest dimension whose coherent-state norm deficit is below `limit`.
pub fn coherent_truncation(alpha: c64, limit: f64) -> usize {
    let mut d = 1;
    while coherent_norm_deficit(alpha, d) > limit {
        d += 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(d: usize) -> FockSpace {
        FockSpace::new(d).unwrap()
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(FockSpace::new(0).is_err());
    }

    #[test]
    fn annihilation_lowers_one_to_vacuum() {
        let a = annihilation(space(2));
        let one = StateVector::fock(space(2), 1).unwrap();
        let out = a.apply(&one).unwrap();
        assert_eq!(out.amplitudes(), &[ONE, ZERO]);
    }

    #[test]
    fn annihilation_matrix_element() {
        let a = annihilation(space(3));
        assert!((a.matrix().get(1, 2).re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.matrix().get(2, 1), ZERO);
    }

    #[test]
    fn commutator_is_identity_below_top_level() {
        let s = space(8);
        let a = annihilation(s);
        let comm = a.commutator(&a.adjoint()).to_dense();
        for i in 0..7 {
            for j in 0..7 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - c64::new(expected, 0.0)).norm() < 1e-14);
            }
        }
        // the top level is where truncation shows
        assert!((comm[(7, 7)].re + 7.0).abs() < 1e-12);
    }

    #[test]
    fn number_operator_is_exact_diagonal() {
        let n = number(space(6)).to_dense();
        for i in 0..6 {
            assert_eq!(n[(i, i)], c64::new(i as f64, 0.0));
        }
        let ad_a = creation(space(6)).mul(&annihilation(space(6))).to_dense();
        for i in 0..6 {
            assert!((ad_a[(i, i)].re - i as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn embedded_number_operators_on_product_state() {
        let spaces = [space(2), space(2)];
        let n = number(space(2));
        let n0 = embed(&n, 0, &spaces).unwrap();
        let n1 = embed(&n, 1, &spaces).unwrap();
        let psi = StateVector::fock(space(2), 1).unwrap().tensor(&StateVector::fock(space(2), 0).unwrap());
        assert_eq!(expectation(&n0, &psi).unwrap(), ONE);
        assert_eq!(expectation(&n1, &psi).unwrap(), ZERO);
    }

    #[test]
    fn operators_on_disjoint_modes_commute_exactly() {
        let spaces = [space(4), space(5)];
        let a = embed(&annihilation(space(4)), 0, &spaces).unwrap();
        let b = embed(&annihilation(space(5)), 1, &spaces).unwrap();
        assert_eq!(a.mul(&b).to_dense(), b.mul(&a).to_dense());
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let spaces = [space(4), space(5)];
        assert!(matches!(embed(&annihilation(space(3)), 0, &spaces), Err(Error::DimensionMismatch { .. })));
        assert!(embed(&annihilation(space(4)), 2, &spaces).is_err());
    }

    #[test]
    fn coherent_state_vacuum() {
        let psi = coherent_state(ZERO, space(5)).unwrap();
        assert_eq!(psi.amplitudes()[0], ONE);
        assert!(psi.amplitudes()[1..].iter().all(|a| *a == ZERO));
    }

    #[test]
    fn coherent_state_mean_photon_number() {
        let psi = coherent_state(ONE, space(30)).unwrap();
        let n = expectation(&number(space(30)), &psi).unwrap();
        assert!((n.re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coherent_state_is_normalized() {
        let psi = coherent_state(c64::new(2f64.sqrt(), 0.0), space(40)).unwrap();
        assert!((psi.inner(&psi).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_state_rejects_short_truncation() {
        let err = coherent_state(c64::new(3.0, 0.0), space(10)).unwrap_err();
        assert!(matches!(err, Error::InsufficientTruncation { .. }));
    }

    #[test]
    fn second_moment_on_coherent_state() {
        let alpha = c64::new(0.7, -0.4);
        let s = space(40);
        let psi = coherent_state(alpha, s).unwrap();
        let b2 = annihilation(s).pow(2);
        let m = expectation(&b2, &psi).unwrap();
        assert!((m - alpha * alpha).norm() < 1e-10);
    }

    #[test]
    fn fock_state_number() {
        let s = space(5);
        let psi = StateVector::fock(s, 2).unwrap();
        assert_eq!(expectation(&number(s), &psi).unwrap(), c64::new(2.0, 0.0));
        assert!(StateVector::fock(s, 5).is_err());
    }

    #[test]
    fn identity_expectation_on_density_matrix() {
        let s = space(12);
        let rho = DensityMatrix::pure(&coherent_state(c64::new(0.3, 0.2), s).unwrap());
        let one = expectation(&Operator::identity(&[12]), &rho).unwrap();
        assert!((one - ONE).norm() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = DensityMatrix::pure(&StateVector::vacuum(&[3]));
        assert!(matches!(expectation(&number(space(4)), &rho), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let (sa, sb) = (space(3), space(4));
        let pa = StateVector::fock(sa, 1).unwrap();
        let pb = StateVector::fock(sb, 2).unwrap();
        let rho = DensityMatrix::pure(&pa.tensor(&pb));
        let rb = rho.reduce_to(1);
        assert!((rb.population(2) - 1.0).abs() < 1e-14);
        assert_eq!(rho.mode_populations(1)[2], rb.population(2));
    }

    proptest! {
        #[test]
        fn hermitian_expectations_are_real(re in -1.5f64..1.5, im in -1.5f64..1.5, d in 20usize..30) {
            let s = space(d);
            let alpha = c64::new(re, im);
            prop_assume!(coherent_norm_deficit(alpha, d) < COHERENT_NORM_DEFICIT);
            let rho = DensityMatrix::pure(&coherent_state(alpha, s).unwrap());
            let a = annihilation(s);
            let x = a.add(&a.adjoint());
            let n2 = number(s).pow(2);
            prop_assert!(expectation(&x, &rho).unwrap().im.abs() < 1e-10);
            prop_assert!(expectation(&n2, &rho).unwrap().im.abs() < 1e-10);
        }

        #[test]
        fn embedded_expectation_factorizes(re in -1.0f64..1.0, n in 0usize..4) {
            let (sa, sb) = (space(18), space(5));
            let pa = coherent_state(c64::new(re, 0.3), sa).unwrap();
            let pb = StateVector::fock(sb, n).unwrap();
            let psi = pa.tensor(&pb);
            let a = annihilation(sa);
            let op = a.mul(&a).add(&number(sa));
            let lifted = embed(&op, 0, &[sa, sb]).unwrap();
            let lhs = expectation(&lifted, &psi).unwrap();
            let rhs = expectation(&op, &pa).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-13);
        }

        #[test]
        fn coherent_norm_deficit_decreases_with_dim(x in 0.1f64..4.0, d in 1usize..25) {
            let alpha = c64::new(x, 0.0);
            prop_assert!(coherent_norm_deficit(alpha, d + 1) < coherent_norm_deficit(alpha, d));
        }
    }
}
