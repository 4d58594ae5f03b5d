use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A function was evaluated outside its domain (non-finite value,
    /// negative base, parameter outside an open range).
    #[error("domain error: {0}")]
    Domain(String),

    /// A series truncation could not be certified below the requested
    /// tolerance.
    #[error("divergence: {0}")]
    Divergence(String),

    /// A construction would exceed the configured state-space cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A stated hypothesis of a limit theorem does not hold for the given
    /// data. Distinct from a convergence failure.
    #[error("hypothesis violated: {0}")]
    Precondition(String),

    #[error("no summand provided for index value {value}")]
    MissingSummand { value: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
