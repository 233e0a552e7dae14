//! Finite-dimensional check of the Hilbert-basis characterisation.
//!
//! For an orthonormal family `N ⊂ Hⁿ` the following are equivalent:
//! (b) `u = Σ_{z∈N} z⟨z, u⟩` for every `u`;
//! (c) `‖u‖² = Σ_{z∈N} |⟨z, u⟩|²` for every `u`;
//! (d) the only vector orthogonal to all of `N` is zero.
//! (b) and (c) are checked on sampled vectors, (d) on the standard basis
//! projected onto the orthocomplement of `span N`.

use serde::Serialize;

use crate::error::{QopError, Result};
use crate::harness::rng::QRng;
use crate::linalg::QVector;

const BASIS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize)]
pub struct BasisReport {
    /// `max |⟨zᵢ, zⱼ⟩ − δᵢⱼ|` over the family.
    pub orthonormality_deviation: f64,
    pub orthonormal: bool,
    /// Largest relative expansion residual `‖u − Σ z⟨z,u⟩‖ / ‖u‖` over samples.
    pub expansion_deviation: f64,
    /// Largest relative Parseval defect `|‖u‖² − Σ|⟨z,u⟩|²| / ‖u‖²` over samples.
    pub parseval_deviation: f64,
    /// Norm of the largest standard basis component left orthogonal to `N`.
    pub orthocomplement_residual: f64,
    pub complete: bool,
    pub is_basis: bool,
    pub samples: usize,
    pub seed: u64,
}

impl BasisReport {
    pub fn max_deviation(&self) -> f64 {
        self.orthonormality_deviation
            .max(self.expansion_deviation)
            .max(self.parseval_deviation)
    }
}

fn expansion(family: &[QVector], u: &QVector) -> (QVector, f64) {
    let mut acc = QVector::zeros(u.len());
    let mut parseval = 0.0;
    for z in family {
        let c = z.inner_unchecked(u);
        parseval += c.norm_sqr();
        acc = &acc + &z.mul_right(c);
    }
    (acc, parseval)
}

pub fn verify_hilbert_basis(family: &[QVector], samples: usize, seed: u64) -> Result<BasisReport> {
    let n = family.first().map(QVector::len).ok_or_else(|| {
        QopError::InvalidParameter("empty family".into())
    })?;
    if family.iter().any(|z| z.len() != n) {
        return Err(QopError::DimensionMismatch("family vectors of unequal length".into()));
    }

    let mut ortho = 0.0f64;
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate() {
            let mut g = a.inner_unchecked(b);
            if i == j {
                g.w -= 1.0;
            }
            ortho = ortho.max(g.norm());
        }
    }

    let mut rng = QRng::new(seed);
    let mut expansion_dev = 0.0f64;
    let mut parseval_dev = 0.0f64;
    for _ in 0..samples {
        let u = rng.gaussian_vector(n);
        let nu2 = u.norm_sqr();
        let (recon, parseval) = expansion(family, &u);
        expansion_dev = expansion_dev.max((&u - &recon).norm() / nu2.sqrt());
        parseval_dev = parseval_dev.max((nu2 - parseval).abs() / nu2);
    }

    let mut complement = 0.0f64;
    for i in 0..n {
        let e = QVector::basis(n, i);
        let (recon, _) = expansion(family, &e);
        complement = complement.max((&e - &recon).norm());
    }

    let orthonormal = ortho <= BASIS_TOL;
    let complete = orthonormal && complement <= BASIS_TOL.sqrt();
    let is_basis = complete && expansion_dev <= BASIS_TOL && parseval_dev <= BASIS_TOL;
    Ok(BasisReport {
        orthonormality_deviation: ortho,
        orthonormal,
        expansion_deviation: expansion_dev,
        parseval_deviation: parseval_dev,
        orthocomplement_residual: complement,
        complete,
        is_basis,
        samples,
        seed,
    })
}
