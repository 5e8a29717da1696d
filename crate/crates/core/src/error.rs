use thiserror::Error;

use crate::caratheodory::OracleKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },
    #[error("the zero matrix has no singular value decomposition")]
    ZeroMatrix,
    #[error("the norm is not differentiable at the zero matrix")]
    NonDifferentiableAtZero,
    #[error("size cap exceeded for {what}: {required} > {cap}")]
    SizeCap {
        what: &'static str,
        required: u128,
        cap: u128,
    },
    #[error("invalid weighted simplicial complex: {0}")]
    InvalidComplex(String),
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not positive semidefinite: {0}")]
    NotPsd(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error(
        "no atom satisfies the descent condition at k={k} (smallest derivative {min_derivative:e}): \
         target outside conv(S) or {oracle} oracle too weak"
    )]
    Infeasible {
        k: usize,
        min_derivative: f64,
        oracle: OracleKind,
    },
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
