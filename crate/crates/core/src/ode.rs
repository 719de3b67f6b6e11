//! Adaptive Dormand–Prince 5(4) integration of complex linear-ish systems.

use faer::c64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const MAX_STEPS: usize = 5_000_000;

// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights (the last row of A) minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` with error-per-step control.
///
/// `f` writes the derivative into its third argument.
pub fn integrate<F>(mut f: F, t0: f64, t1: f64, y0: &[c64], tol: Tolerances) -> Result<(Vec<c64>, OdeStats)>
where
    F: FnMut(f64, &[c64], &mut [c64]),
{
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::InvalidParameter { name: "tolerance", reason: "rtol and atol must be positive".into() });
    }
    if !(t1.is_finite() && t0.is_finite()) || t1 < t0 {
        return Err(Error::InvalidParameter { name: "t", reason: format!("cannot integrate from {t0} to {t1}") });
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut stats = OdeStats::default();
    if t1 == t0 || n == 0 {
        return Ok((y, stats));
    }

    let zero = c64::new(0.0, 0.0);
    let mut k: Vec<Vec<c64>> = vec![vec![zero; n]; 7];
    let mut ytmp = vec![zero; n];
    let mut ynew = vec![zero; n];

    f(t0, &y, &mut k[0]);
    let mut h = initial_step(&y, &k[0], t1 - t0, tol);
    let mut t = t0;
    let mut fac_old = 1e-4f64;

    while t < t1 {
        if stats.accepted + stats.rejected > MAX_STEPS {
            return Err(Error::IntegratorFailure { t, reason: format!("step budget of {MAX_STEPS} exhausted") });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * (h * a);
                    }
                }
                ytmp[i] = acc;
            }
            f(t + C[s] * h, &ytmp, &mut k[s]);
            if s == 6 {
                ynew.copy_from_slice(&ytmp);
            }
        }

        let mut err = 0.0;
        for i in 0..n {
            let mut e = zero;
            for (s, ks) in k.iter().enumerate() {
                if E[s] != 0.0 {
                    e += ks[i] * E[s];
                }
            }
            let sc = tol.atol + tol.rtol * y[i].norm().max(ynew[i].norm());
            let r = (e * h).norm() / sc;
            err += r * r;
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::IntegratorFailure { t, reason: "non-finite error estimate".into() });
        }

        if err <= 1.0 {
            stats.accepted += 1;
            t = if last { t1 } else { t + h };
            std::mem::swap(&mut y, &mut ynew);
            // first-same-as-last
            let (first, rest) = k.split_at_mut(1);
            first[0].copy_from_slice(&rest[5]);
            // PI controller (Hairer's beta = 0.04)
            let fac = (err.max(1e-10).powf(0.2 - 0.04 * 0.75) * fac_old.powf(0.04)).recip() * 0.9;
            h *= fac.clamp(0.2, 10.0);
            fac_old = err.max(1e-4);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::IntegratorFailure { t, reason: format!("step size underflow (h = {h:.3e})") });
        }
    }
    Ok((y, stats))
}

fn initial_step(y: &[c64], dy: &[c64], span: f64, tol: Tolerances) -> f64 {
    let n = y.len() as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for (yi, fi) in y.iter().zip(dy) {
        let sc = tol.atol + tol.rtol * yi.norm();
        d0 += (yi.norm() / sc).powi(2);
        d1 += (fi.norm() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(span)
}
