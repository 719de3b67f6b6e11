//! Closed-form results: special functions, steady-state moments, Fisher
//! information, uncertainties and characteristic scales.

mod closed_system;
mod moments;
mod scales;
mod special;
mod uncertainty;

pub use closed_system::{optimal_allocation, optimal_allocation_search, qfi_classical_exact, qfi_closed_form, InitialState};
pub use moments::{moment_gb0, moment_series, moment_ss, MomentParams, MomentSeries, MOMENT_TERM_BUDGET};
pub use scales::{
    characteristic_time, critical_lambda, delta2_lambda, golden_section_min, lambda_sensor, sensor_photon_number,
    thermal_occupation, Relaxation, SensorOptimum, SensorReport,
};
pub use special::{hyp2f1_half_sequence, hyp2f1_terminating, pochhammer};
pub use uncertainty::{delta2_g, Observable, Regime, UncertaintyReport, Variant};

/// Gaussian QFI of the two-photon steady state without
/// single-photon signal loss: `2λ_a(κ_eγ_a - 2g²)²/(g(κ_eγ_a + 2g²)³)`.
pub fn qfi_gb0_kappa(params: &crate::dynamics::SystemParams) -> f64 {
    let (g, s, d) = (
        params.g,
        params.kappa_e * params.gamma_a + 2.0 * params.g * params.g,
        params.kappa_e * params.gamma_a - 2.0 * params.g * params.g,
    );
    2.0 * params.lambda_a * d * d / (g * s.powi(3))
}

/// Three-level Fisher information at `g = 0`. The printed form is
/// `6λ_a²/(γ_a(κ_e+γ_b)²)`; the re-derived one carries `γ_a²`.
pub fn qfi_three_level_zero(params: &crate::dynamics::SystemParams, variant: Variant) -> f64 {
    let loss = params.kappa_e + params.gamma_b;
    let pump = match variant {
        Variant::Printed => params.gamma_a,
        Variant::Rederived => params.gamma_a * params.gamma_a,
    };
    6.0 * params.lambda_a * params.lambda_a / (pump * loss * loss)
}
