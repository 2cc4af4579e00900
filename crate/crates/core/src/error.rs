use thiserror::Error;

/// Errors raised by the numerical routines and the experiment drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument out of domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular statistic: s must be strictly positive")]
    SingularStatistic,

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimated error {error:e})")]
    QuadratureNonConvergence { subdivisions: usize, error: f64 },

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("no positive root of g - h in (0, 1) for d = {d}, n = {n}")]
    NoRoot { d: usize, n: usize },

    #[error("non-finite log ratio in replicate stream {stream_id}: {detail}")]
    NonFinite { stream_id: u64, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}
