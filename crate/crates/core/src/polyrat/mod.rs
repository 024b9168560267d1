//! Polynomials and rational functions over `F_q`: arithmetic, square-free
//! decomposition, normalization, exceptionality, the `f(1/x)` reduction, and
//! family enumeration.

pub mod family;
mod poly;
mod rational;
mod squarefree;

pub use family::{enumerate_family, enumerate_family_with, Family, FamilyOptions};
pub use poly::Poly;
pub use rational::{
    is_constant_times_power, is_exceptional, reciprocal_reduce, ExceptionalityWitness,
    RationalDisplay, RationalFunc,
};
pub use squarefree::{squarefree_decomp, SquarefreeDecomposition};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("numerator must be nonzero")]
    ZeroNumerator,
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("division is not exact")]
    Inexact,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}
