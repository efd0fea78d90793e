use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("index {index} is beyond the materialized prefix (p_max = {p_max})")]
    BeyondPrefix { index: u64, p_max: u64 },

    #[error("supremum scan saturated: {0}")]
    Saturated(String),

    #[error("prefix exhausted: {0}")]
    PrefixExhausted(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("box mismatch: {0}")]
    BoxMismatch(String),

    #[error("box exhausted: {0}")]
    BoxExhausted(String),

    #[error("eigen-solver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("bilinear evaluator failed at {index}: {message}")]
    Evaluator { index: String, message: String },

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// Numerical failures (saturation, exhaustion, non-convergence) as opposed
    /// to validation problems with the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Saturated(_)
                | Error::PrefixExhausted(_)
                | Error::BoxExhausted(_)
                | Error::NoConvergence(_)
                | Error::NonFinite(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
