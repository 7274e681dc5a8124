use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} outside range [{min}, {max}]")]
    Range { index: i32, min: i32, max: i32 },

    #[error("non-finite value encountered: {0}")]
    Numeric(String),

    /// Hypotheses required by an operation do not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Spectral content outside the covered Littlewood–Paley band.
    #[error("band truncation: relative tail mass {tail:.3e} exceeds {limit:.1e}")]
    Truncation { tail: f64, limit: f64 },

    /// A member of a dyadic family violates its declared bounds.
    #[error("family member j = {j} rejected: {reason}")]
    Rejected { j: i32, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
