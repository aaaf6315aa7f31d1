//! Graded coordinates, Koszul-signed superfunctions and graded derivations.
//!
//! All signs use the total degree only; bidegrees are carried as metadata.

mod chart;
mod derivation;
mod morphism;
mod superfunction;
pub mod text;

pub use chart::{Chart, GradedCoordinate, Role};
pub use derivation::{derived_bracket, Derivation, QCheck};
pub use morphism::Morphism;
pub use superfunction::{Homogeneity, Monomial, Superfunction};
pub use text::{parse_derivation, parse_superfunction};

use thiserror::Error;

use crate::scalar::{ParseScalarError, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("chart mismatch")]
    ChartMismatch,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("unknown coordinate '{0}'")]
    UnknownCoordinate(String),
    #[error("duplicate coordinate '{0}'")]
    DuplicateCoordinate(String),
    #[error("inhomogeneous component for '{0}'")]
    Inhomogeneous(String),
    #[error(transparent)]
    Parse(#[from] ParseScalarError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `(-1)^(a*b)` as a boolean "negative".
pub(crate) fn koszul(a: i64, b: i64) -> bool {
    (a * b).rem_euclid(2) == 1
}
