use thiserror::Error;

/// Errors produced by the numerical laboratory.
///
/// Divergence is a first-class outcome here, not a panic: integrals and
/// norms that blow up across refinement levels are reported as
/// [`Error::Divergence`] so callers can distinguish "diverges as expected"
/// from a numerical failure.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("divergent measure: weight exponent {lambda} with height floor 0")]
    DivergentMeasure { lambda: f64 },

    #[error("evaluation error: non-finite value {value} at node {node:?}")]
    Evaluation { value: f64, node: Vec<f64> },

    #[error("divergence detected across refinement levels: {values:?}")]
    Divergence { values: Vec<f64> },

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("truncation failure: {0}")]
    Truncation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
