//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operands live on different ambients or have incompatible shapes.
    #[error("structural error: {0}")]
    Structure(String),
    #[error("degree is undefined for the zero element")]
    ZeroDegree,
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A linear solve had no solution; `residual` renders the unsolved part.
    #[error("no solution for {what}; residual: {residual}")]
    Infeasible { what: String, residual: String },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    /// An identity that a theorem guarantees failed; indicates a bug.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("order {order} exceeds truncation order {k}")]
    Truncation { order: usize, k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
