//! Numerical operator theory on `Hⁿ`, the right quaternionic Hilbert space of
//! dimension `n`.
//!
//! Layers, bottom to top:
//!
//! - [`quaternion`]: scalar arithmetic.
//! - [`linalg`]: vectors, matrices, inner product, complex embedding `χ`.
//! - [`spectral`]: Hermitian eigensolver, functional calculus, powers,
//!   Löwner order, `Δ_q(T)` and spherical spectra.
//! - [`decomp`]: polar decomposition and the Aluthge family of transforms.
//! - [`oracles`]: operator-class predicates and margin-valued checks of the
//!   classical inequalities (Löwner–Heinz, Hölder–McCarthy, Furuta, GCSI…).
//! - [`harness`]: seeded generators, parallel trial runner, counterexample
//!   shrinking and verification reports.

pub mod decomp;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod oracles;
pub mod quaternion;
pub mod spectral;

pub use error::{QopError, Result};
pub use linalg::{QMatrix, QVector};
pub use quaternion::Quaternion;
