use thiserror::Error;

/// Errors produced by the simulation and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate variance {value:e} at threshold {threshold}")]
    DegenerateVariance { threshold: f64, value: f64 },

    #[error("decay fit failed: {0}")]
    FitFailure(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
