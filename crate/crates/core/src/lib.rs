//! Numerical laboratory for quantum metrology in driven-dissipative degenerate
//! parametric down-conversion.
//!
//! A pump mode `a` drives a signal mode `b` through `g(a b†² + a† b²)`; both
//! modes leak photons, and the signal may also lose photon pairs. The crate
//! simulates the two-mode and adiabatically reduced one-mode Lindblad models on
//! truncated Fock spaces, estimates `g` through quantum Fisher information and
//! error propagation, and keeps every closed-form result in [`analytic`] and
//! [`meanfield`] so that the two sides can be checked against each other.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod meanfield;
pub mod metrology;
pub mod ode;
pub mod sparse;

pub use error::{Error, Result};
