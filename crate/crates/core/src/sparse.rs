//! Compressed-row complex matrices.
//!
//! Fock-space operators and Liouvillians are extremely sparse (a handful of
//! entries per row), so everything above the dense linear-algebra boundary
//! works on this representation and converts to `faer` matrices only for
//! factorizations and eigendecompositions.

use faer::c64;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<c64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` entries. Duplicates are summed
    /// and exact zeros dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, c64)>,
    {
        let mut rows: Vec<Vec<(usize, c64)>> = vec![Vec::new(); nrows];
        for (i, j, v) in entries {
            assert!(i < nrows && j < ncols, "entry ({i}, {j}) out of bounds");
            rows[i].push((j, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut acc = c64::new(0.0, 0.0);
                while k < row.len() && row[k].0 == j {
                    acc += row[k].1;
                    k += 1;
                }
                if acc != c64::new(0.0, 0.0) {
                    indices.push(j);
                    values.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        Self { nrows, ncols, indptr, indices, values }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, c64::new(1.0, 0.0))))
    }

    pub fn from_dense(m: &Mat<c64>) -> Self {
        let entries = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, m[(i, j)]));
        Self::from_triplets(m.nrows(), m.ncols(), entries)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Iterates over stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            (self.indptr[i]..self.indptr[i + 1]).map(move |k| (i, self.indices[k], self.values[k]))
        })
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, c64)> + '_ {
        (self.indptr[i]..self.indptr[i + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        match self.indices[lo..hi].binary_search(&j) {
            Ok(k) => self.values[lo + k],
            Err(_) => c64::new(0.0, 0.0),
        }
    }

    pub fn scale(&self, s: c64) -> Self {
        if s == c64::new(0.0, 0.0) {
            return Self::zeros(self.nrows, self.ncols);
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(self.nrows, self.ncols, self.iter().chain(other.iter()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(c64::new(-1.0, 0.0)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(i, j, v)| (j, i, v)))
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.iter().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "inner dimensions differ");
        let mut acc = vec![c64::new(0.0, 0.0); other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut entries = Vec::new();
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if acc[j] == c64::new(0.0, 0.0) {
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            for &j in &touched {
                entries.push((i, j, acc[j]));
                acc[j] = c64::new(0.0, 0.0);
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, entries)
    }

    /// Kronecker product `self ⊗ other`; the row index of `other` varies fastest.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.nrows, other.ncols);
        let entries = self.iter().flat_map(|(i1, j1, a)| {
            other.iter().map(move |(i2, j2, b)| (i1 * r2 + i2, j1 * c2 + j2, a * b))
        });
        Self::from_triplets(self.nrows * r2, self.ncols * c2, entries.collect::<Vec<_>>())
    }

    pub fn matvec(&self, x: &[c64]) -> Vec<c64> {
        let mut y = vec![c64::new(0.0, 0.0); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[c64], y: &mut [c64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = c64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yi = acc;
        }
    }

    /// `self * m` for a dense right-hand side.
    pub fn mul_dense(&self, m: &Mat<c64>) -> Mat<c64> {
        assert_eq!(self.ncols, m.nrows());
        let mut out = Mat::<c64>::zeros(self.nrows, m.ncols());
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for j in 0..m.ncols() {
                    out[(i, j)] += a * m[(k, j)];
                }
            }
        }
        out
    }

    /// `m * self` for a dense left-hand side.
    pub fn dense_mul(&self, m: &Mat<c64>) -> Mat<c64> {
        assert_eq!(m.ncols(), self.nrows);
        let mut out = Mat::<c64>::zeros(m.nrows(), self.ncols);
        for (k, j, b) in self.iter() {
            for i in 0..m.nrows() {
                out[(i, j)] += m[(i, k)] * b;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut m = Mat::<c64>::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn to_faer(&self) -> SparseColMat<usize, c64> {
        let trips: Vec<_> = self.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trips)
            .expect("triplets are in bounds")
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum (the induced infinity norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|self - self†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let m = CsrMatrix::from_triplets(2, 2, [(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 1.0)), (1, 0, c(0.0, 0.0))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 1.0));
        assert_eq!(m.get(1, 0), c(0.0, 0.0));
    }

    #[test]
    fn kron_matches_dense_definition() {
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, c(1.0, 0.0)), (0, 1, c(0.0, 2.0)), (1, 1, c(3.0, 0.0))]);
        let b = CsrMatrix::from_triplets(2, 3, [(0, 2, c(1.0, 1.0)), (1, 0, c(-1.0, 0.0))]);
        let k = a.kron(&b).to_dense();
        let (ad, bd) = (a.to_dense(), b.to_dense());
        for i1 in 0..2 {
            for j1 in 0..2 {
                for i2 in 0..2 {
                    for j2 in 0..3 {
                        assert_eq!(k[(i1 * 2 + i2, j1 * 3 + j2)], ad[(i1, j1)] * bd[(i2, j2)]);
                    }
                }
            }
        }
    }

    #[test]
    fn matmul_and_matvec_agree_with_dense() {
        let a = CsrMatrix::from_triplets(3, 3, [(0, 0, c(1.0, 0.5)), (1, 2, c(2.0, 0.0)), (2, 1, c(0.0, -1.0)), (2, 2, c(4.0, 0.0))]);
        let b = a.adjoint();
        let p = a.matmul(&b).to_dense();
        let pd = a.to_dense() * b.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert!((p[(i, j)] - pd[(i, j)]).norm() < 1e-14);
            }
        }
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0)];
        let y = a.matvec(&x);
        let ad = a.to_dense();
        for (i, yi) in y.iter().enumerate() {
            let acc: c64 = x.iter().enumerate().map(|(j, xj)| ad[(i, j)] * xj).sum();
            assert!((acc - yi).norm() < 1e-14);
        }
    }
}
