use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("region is empty")]
    EmptyRegion,

    #[error("region is unbounded")]
    UnboundedRegion,

    /// A submatrix that must be nonsingular for a generic channel was singular.
    #[error("degenerate channel draw, resample required: {0}")]
    ResampleRequired(String),

    #[error("capability exceeded: {0}")]
    CapabilityExceeded(String),

    #[error("configuration outside the scheme's regime: {0}")]
    Regime(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid plan: {0}")]
    InvalidPlan(String),

    #[error("resampling exhausted after {attempts} attempts (seed {seed})")]
    ResampleExhausted { seed: u64, attempts: usize },
}
