//! Two-mode and reduced one-mode Lindblad models and their solvers.

mod evolve;
mod liouvillian;
mod model;
mod params;
mod steady;
mod three_level;

pub use evolve::{evolve_closed, evolve_open, evolve_open_trajectory, pdc_generator};
pub use liouvillian::{liouvillian, vec_index};
pub use model::{
    build_full_model, build_reduced_model, reduced_fixed_point, signal_channels, Channel, LindbladModel,
};
pub use params::SystemParams;
pub use steady::{
    lossless_signal_dim, lossless_signal_steady_state, relax_to_steady_state, spectral_gap, spectral_gap_converged, steady_state, SteadyMethod, SteadyStateResult,
    SteadyTolerances,
};
pub use three_level::{three_level_evolve, three_level_steady, ThreeLevelState};
