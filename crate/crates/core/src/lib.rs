pub mod graded;
pub mod scalar;

pub use graded::{Chart, Derivation, GradedCoordinate, GradedError, Superfunction};
pub use scalar::{BaseVar, Scalar, ScalarError};
pub mod catalog;
pub mod tensor;
pub mod prolongation;
pub mod equivariance;
pub mod sampling;
pub mod solver;
pub mod sigma;
pub mod courant;
