use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("policy space too large: {count} deterministic policies (limit {limit})")]
    PolicySpaceTooLarge { count: f64, limit: usize },

    #[error("degenerate cut direction (norm {norm:e})")]
    DegenerateCut { norm: f64 },

    #[error("ellipsoid shape matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("feature matrix has zero spread")]
    DegenerateFeatures,

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
}

impl Error {
    /// True for failures caused by floating-point breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::NotPositiveDefinite | Error::DegenerateCut { .. }
        )
    }
}
