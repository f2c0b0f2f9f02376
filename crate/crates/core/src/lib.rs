//! Exact symbolic engine for right alternative metabelian algebras.
//!
//! The crate computes multilinear components of T-ideals of identity systems
//! (`RA2`, `RA-L(s)`), checks relations in the algebra of multiplication
//! operators acting on the square of the free algebra, and models the graded
//! algebras `A^(eps)`, their quotients and Grassmann envelopes.

pub mod freealg;
pub mod operalg;
pub mod parse;
pub mod scalar;
pub mod suite;
pub mod superalg;
pub mod tideal;
mod util;
pub mod varieties;

use thiserror::Error;

pub use scalar::{FieldSpec, Rational, Scalar, ScalarError};

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("polynomial is not homogeneous: expected multidegree {expected}, found {found}")]
    Inhomogeneous { expected: String, found: String },
    #[error("polynomial must be multilinear")]
    NotMultilinear,
    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("element is not parity-homogeneous")]
    NotHomogeneous,
    #[error("Grassmann and algebra parities do not match in an envelope pair")]
    ParityMismatch,
    #[error("witness vanished: {0}")]
    WitnessVanished(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cache file {path}: {message}")]
    Cache { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = AlgebraError> = std::result::Result<T, E>;
