use thiserror::Error;

/// Errors raised by the simulation, estimation and scenario layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("insufficient truncation: norm deficit {deficit:.3e} exceeds {limit:.1e} at dim {dim}")]
    InsufficientTruncation { dim: usize, deficit: f64, limit: f64 },

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NonHermitian(f64),

    #[error("state is not normalized (norm {0:.12})")]
    NotNormalized(f64),

    #[error("integrator failed at t = {t}: {reason}")]
    IntegratorFailure { t: f64, reason: String },

    #[error("steady state is not unique (null-space dimension {0})")]
    NonUniqueSteadyState(usize),

    #[error("steady-state solve failed: residual {residual:.3e} above tolerance {tol:.1e}")]
    SteadyStateFailure { residual: f64, tol: f64 },

    #[error("model has no dissipative channel")]
    NoDissipation,

    #[error("truncation not converged: {what} changed by {rel_change:.3e} when the dimension was raised")]
    TruncationNotConverged { what: &'static str, rel_change: f64 },

    #[error("eigendecomposition failed")]
    EigenFailure,

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("parameter derivative of the mean vanishes; the uncertainty diverges")]
    DivergentUncertainty,

    #[error("{0} diverges for these parameters")]
    Divergent(&'static str),

    #[error("covariance matrix is singular")]
    SingularCovariance,

    #[error("series did not converge within {terms} terms")]
    SeriesNotConverged { terms: usize },

    #[error("pole in the Pochhammer symbol (z)_n at n = {0}")]
    Pole(usize),

    #[error("parameters outside the {regime} regime: {reason}")]
    OutOfRegime { regime: &'static str, reason: String },

    #[error("fixed point is unstable; no stationary covariance exists")]
    Unstable,

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
