use thiserror::Error;

/// Errors raised by kernel evaluation, representations, state-level quantities and I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter {name} = {value} out of range ({range})")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("metric {0} is not regular (metric constant vanishes)")]
    NonRegular(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge: estimate {estimate}, achieved error {achieved_error:e} after {subdivisions} subdivisions")]
    Quadrature {
        estimate: f64,
        achieved_error: f64,
        subdivisions: usize,
    },

    #[error("analytic continuation failed: {0}")]
    Continuation(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("state is not positive (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid Kraus set: {0}")]
    InvalidKraus(String),

    #[error("negative result {0:e} beyond tolerance")]
    NegativeResult(f64),

    #[error("unknown suite: {0}")]
    UnknownSuite(String),

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
