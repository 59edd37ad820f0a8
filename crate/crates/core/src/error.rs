use thiserror::Error;

/// Errors raised by lattice construction, generator assembly and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("pair indexing mode `{mode}` is not available for this lattice: {reason}")]
    UnsupportedPairMode { mode: &'static str, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{0}")]
    Unsupported(String),

    #[error("field scenario has a limit cycle, not a fixed point; use late_time_average")]
    LimitCycle,

    #[error("{solver} did not converge: {detail}")]
    NoConvergence { solver: &'static str, detail: String },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("capacity exceeded: {0}")]
    CapExceeded(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("at gamma/kappa = {gamma_over_kappa}, T/h = {t_over_h}: {source}")]
    GridPoint { gamma_over_kappa: f64, t_over_h: f64, source: Box<Error> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
