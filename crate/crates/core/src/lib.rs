//! Exact arithmetic for rational quadratic forms: local-global invariants
//! (Hilbert symbols, Hasse invariants, p-adic square classes), isotropy and
//! representation over Q, admissible-form extension with isometry lifting,
//! and explicit arithmetic-group constructions over Z, Z[i] and quadratic
//! towers. All computations are exact; no floating point.

pub mod error;
pub mod extend;
pub mod json;
pub mod lattice;
pub mod localinv;
pub mod matrix;
pub mod padic;
pub mod quadform;
pub mod rational;
pub mod tower;

pub use error::{Error, Result};
pub use localinv::{
    discriminant_class, hasse_invariant, hilbert_symbol, relevant_places, InvariantProfile,
    SquareClass,
};
pub use matrix::{Matrix, Scalar};
pub use padic::{is_square_in_qp, Place};
pub use quadform::{DiagonalForm, Embedding, QuadraticForm};
pub use rational::Rational;
pub use tower::{FieldDescriptor, FieldElement, Sign};

/// Matrices over the rationals.
pub type QMatrix = Matrix<Rational>;
/// Matrices over quadratic tower elements.
pub type KMatrix = Matrix<FieldElement>;
