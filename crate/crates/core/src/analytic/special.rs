//! Terminating Gauss hypergeometric series `₂F₁[-m, y; z; 2]`.

use crate::error::{Error, Result};

/// Compensated (Neumaier) running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Rising factorial `(r)_n = r(r+1)…(r+n-1)` by running product.
pub fn pochhammer(r: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (r + k as f64))
}

/// `Σ_{n=0}^{m} (-m)_n (y)_n 2ⁿ / ((z)_n n!)`, summed exactly term by term.
///
/// Fails with [`Error::Pole`] when `z + n = 0` for some `n < m`.
pub fn hyp2f1_terminating(m: usize, y: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut acc = Neumaier::default();
    acc.add(term);
    for n in 0..m {
        let zn = z + n as f64;
        if zn == 0.0 {
            return Err(Error::Pole(n));
        }
        let nf = n as f64;
        term *= (nf - m as f64) * (y + nf) * 2.0 / (zn * (nf + 1.0));
        acc.add(term);
    }
    Ok(acc.value())
}

/// `₂F₁[-m, z/2; z; 2]` for `m = 0..=m_max` via the contiguous relation
/// `F_{m+1} = m F_{m-1} / (z + m)`, `F_0 = 1`, `F_1 = 0`.
///
/// Odd orders vanish identically. The recurrence is stable where the direct
/// alternating series loses every digit to cancellation.
pub fn hyp2f1_half_sequence(m_max: usize, z: f64) -> Vec<f64> {
    let mut f = Vec::with_capacity(m_max + 1);
    f.push(1.0);
    if m_max >= 1 {
        f.push(0.0);
    }
    for m in 1..m_max {
        let next = m as f64 * f[m - 1] / (z + m as f64);
        f.push(next);
    }
    f
}
