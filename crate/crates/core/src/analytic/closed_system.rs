//! Quantum Fisher information of `g` for closed evolution `exp(-igtG)`,
//! `G = ab†² + a†b²`.

use serde::{Deserialize, Serialize};

/// Product initial states with real amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    /// `|α⟩|n⟩`, parameterized by `α²`.
    Semiclassical { alpha_sq: f64, n: f64 },
    /// `|n₁⟩|n₂⟩`.
    Quantum { n1: f64, n2: f64 },
    /// `|α₁⟩|α₂⟩`, parameterized by `α₁²`, `α₂²`.
    Classical { alpha1_sq: f64, alpha2_sq: f64 },
}

/// Closed-form QFI at time `t`:
/// `4[α²(2n²+2n+2) + n(n-1)]t²`, `4[n₁(2n₂²+2n₂+2) + n₂(n₂-1)]t²`, or `α₂⁴t²`.
pub fn qfi_closed_form(initial: InitialState, t: f64) -> f64 {
    let t2 = t * t;
    match initial {
        InitialState::Semiclassical { alpha_sq, n } => 4.0 * (alpha_sq * (2.0 * n * n + 2.0 * n + 2.0) + n * (n - 1.0)) * t2,
        InitialState::Quantum { n1, n2 } => 4.0 * (n1 * (2.0 * n2 * n2 + 2.0 * n2 + 2.0) + n2 * (n2 - 1.0)) * t2,
        InitialState::Classical { alpha2_sq, .. } => alpha2_sq * alpha2_sq * t2,
    }
}

/// `4t² Var(G)` on `|α₁⟩|α₂⟩`, which is what the classical-state QFI
/// actually evaluates to: `4t²[α₂⁴ + α₁²(4α₂² + 2)]`.
pub fn qfi_classical_exact(alpha1_sq: f64, alpha2_sq: f64, t: f64) -> f64 {
    4.0 * t * t * (alpha2_sq * alpha2_sq + alpha1_sq * (4.0 * alpha2_sq + 2.0))
}

/// Large-`N` optimum of the semiclassical QFI at fixed `α² + n = N`:
/// `n = 2N/3`, `F = (32/27) N³ t²`.
pub fn optimal_allocation(total: f64, t: f64) -> (f64, f64) {
    (2.0 * total / 3.0, 32.0 / 27.0 * total.powi(3) * t * t)
}

/// Best integer photon number `n ∈ [0, N]` for the semiclassical closed form.
pub fn optimal_allocation_search(total: u32, t: f64) -> (u32, f64) {
    (0..=total)
        .map(|n| {
            let f = qfi_closed_form(InitialState::Semiclassical { alpha_sq: (total - n) as f64, n: n as f64 }, t);
            (n, f)
        })
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}
