use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result is not representable as a finite, normal `f64`.
    #[error("overflow: {0}")]
    Overflow(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// A tail or head extrapolation found a non-integrable behaviour.
    #[error("divergent extrapolation: {0}")]
    Divergent(String),

    /// A fit could not decide between models with the required confidence.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("parse error: {0}")]
    Parse(String),

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

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        domain(format!("{name} must be finite and > 0, got {x}"))
    }
}
