use thiserror::Error;

/// Errors raised by the library. Every variant maps onto a precondition the
/// caller violated or a numerical situation the algorithms refuse to paper over.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{0} not Hurwitz")]
    NotHurwitz(String),

    #[error("criterion (1) fails: averaged matrix has det {det:.6e} >= 0, no hyperbolic split")]
    NoHyperbolicSplit { det: f64 },

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("no transition: {0}")]
    NoTransition(String),

    #[error("{0} is not symmetric positive definite")]
    NotSpd(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
