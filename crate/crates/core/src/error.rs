use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arithmetic function is not normalized: g(1) = {0}, expected 1")]
    NotNormalized(String),

    #[error("table-backed arithmetic function `{label}` is defined for 1..={len}, queried at {n}")]
    TableRange { label: String, len: u64, n: u64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("outside the domain of the formula: {0}")]
    Domain(String),

    #[error("power series has non-zero constant term; exp is not defined in the formal ring")]
    NonZeroConstantTerm,

    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,

    #[error("cost limit: {0}")]
    CostLimit(String),

    #[error("memory budget of {budget} bytes exceeded (needed about {needed})")]
    Budget { budget: usize, needed: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
