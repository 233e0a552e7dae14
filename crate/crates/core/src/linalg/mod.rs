//! Vectors and matrices over the quaternions, the quaternionic inner product,
//! the standard-basis left scalar action, and the complex adjoint embedding.
//!
//! The standard basis `{e₁, …, eₙ}` is the Hilbert basis inducing left scalar
//! multiplication throughout. Other bases are reached by conjugating with the
//! change-of-basis unitary.

mod basis;
mod complex;
mod matrix;
mod vector;

pub use basis::{verify_hilbert_basis, BasisReport};
pub use complex::{embed_chi, embed_vector, unembed_chi, unembed_vector, ComplexMatrix};
pub use matrix::{adjoint, matmul, matvec, QMatrix};
pub use vector::{inner, left_scalar_mul, QVector};

pub use crate::spectral::operator_norm;

/// Largest supported dimension for vectors and matrices.
pub const MAX_DIM: usize = 64;
