//! Exact arithmetic over Q and quadratic extensions Q(sqrt d).
//!
//! Semilinear convention: a sigma-semilinear map acts by `v -> M * sigma(v)`.

pub mod field;
pub mod json;
pub mod matrix;
pub mod semilinear;

pub use field::{q, q_frac, Galois, QuadElement, QuadField, Q};
pub use matrix::{QuadMatrix, QuadVector};
pub use semilinear::{descend_subspace, fixed_space, SemilinearMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("discriminant {0} is a square in Q")]
    SquareDiscriminant(String),
    #[error("elements from different quadratic fields: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cocycle violation: {0}")]
    CocycleViolation(String),
    #[error("malformed exact value: {0}")]
    Parse(String),
}
