//! Graph calculus for stable curvature invariants: enumeration and
//! canonicalization of colored trivalent graphs, the graded graph algebra
//! and its quotient by IHX relations, numeric evaluation of graphs on
//! algebraic curvature tensors, and the Pfaffian, moment and cubic
//! polynomial families with their verification pipelines.

pub mod algebra;
pub mod curvature;
pub mod exactalg;
pub mod graphs;
pub mod ihx;
pub mod invariants;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("width mismatch: basis width {expected}, vector needs {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a free-algebra Hilbert series: {0}")]
    NotFreeHilbert(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
