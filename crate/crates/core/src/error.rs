use thiserror::Error;

use crate::expr::ExprError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector must have at least one entry")]
    EmptyVector,
    #[error("non-finite component at index {0}")]
    NonFinite(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("index {index} out of range for order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("component h_{0} is not harmonic")]
    NotHarmonic(usize),
    #[error("polynomial is not polyharmonic of order {0}")]
    NotPolyharmonic(usize),
    #[error("Almansi system is rank deficient (rank {rank} of {unknowns})")]
    SingularSystem { rank: usize, unknowns: usize },
    #[error("expected {expected} boundary functions, found {found}")]
    DataSizeMismatch { expected: usize, found: usize },
    #[error("point with base norm {norm} violates the boundary guard (limit {limit})")]
    TooCloseToBoundary { norm: f64, limit: f64 },
    #[error("exterior point has norm {norm}, must be at least {limit}")]
    NotExterior { norm: f64, limit: f64 },
    #[error("complex norm vanishes at evaluation point")]
    ZeroNorm,
    #[error(transparent)]
    Expr(#[from] ExprError),
}
