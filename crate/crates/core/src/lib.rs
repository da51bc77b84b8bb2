//! Curvature-operator laboratory: dense tensor algebra in orthonormal
//! frames, structure-form identity suites, eigenvalue bound theorems, and
//! normal homogeneous model spaces.

pub mod curvature;
pub mod error;
pub mod homogeneous;
pub mod operators;
pub mod structure;
pub mod tensor;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
