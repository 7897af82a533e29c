use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: no convergence after {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("insufficient data: need at least {needed} finite samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
