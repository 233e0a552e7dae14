//! Deterministic random operator families.

use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::harness::rng::QRng;
use crate::linalg::{QMatrix, QVector, MAX_DIM};
use crate::quaternion::Quaternion;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GeneratorKind {
    /// I.i.d. entries with four standard normal components.
    Ginibre,
    /// `(G + G*)/2`.
    Hermitian,
    /// `G*G`.
    Positive,
    /// `B = G₁*G₁`, `A = B + G₂*G₂`, so `A ⪰ B ⪰ 0` by construction.
    OrderedPair,
    /// `W diag(q) W*` for a random unitary `W`; random spectrum when empty.
    NormalWithSpectrum { spectrum: Vec<Quaternion> },
    /// `W₁ diag(1,…,1,0,…,0) W₂*` with the given rank.
    PartialIsometry { rank: usize },
    /// Random normal operator plus `ε·G`.
    NearNormal { eps: f64 },
    /// Random unitary (Gram–Schmidt on Ginibre columns).
    Unitary,
}

impl GeneratorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::Ginibre => "ginibre",
            GeneratorKind::Hermitian => "hermitian",
            GeneratorKind::Positive => "positive",
            GeneratorKind::OrderedPair => "ordered-pair",
            GeneratorKind::NormalWithSpectrum { .. } => "normal-with-spectrum",
            GeneratorKind::PartialIsometry { .. } => "partial-isometry",
            GeneratorKind::NearNormal { .. } => "near-normal",
            GeneratorKind::Unitary => "unitary",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub dim: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Generated {
    Single(QMatrix),
    /// `(A, B)` with `A ⪰ B ⪰ 0`.
    Pair(QMatrix, QMatrix),
}

impl Generated {
    pub fn single(self) -> Option<QMatrix> {
        match self {
            Generated::Single(m) => Some(m),
            Generated::Pair(..) => None,
        }
    }
}

pub fn ginibre(rng: &mut QRng, n: usize) -> QMatrix {
    QMatrix::from_vec(n, n, (0..n * n).map(|_| rng.quaternion()).collect())
}

pub fn hermitian(rng: &mut QRng, n: usize) -> QMatrix {
    ginibre(rng, n).hermitian_part()
}

pub fn positive(rng: &mut QRng, n: usize) -> QMatrix {
    let g = ginibre(rng, n);
    gram(&g)
}

/// `G*G`, made exactly selfadjoint.
pub fn gram(g: &QMatrix) -> QMatrix {
    (&g.adjoint() * g).hermitian_part()
}

pub fn ordered_pair(rng: &mut QRng, n: usize) -> (QMatrix, QMatrix) {
    let b = positive(rng, n);
    let d = positive(rng, n);
    let a = &b + &d;
    (a, b)
}

/// Orthonormalises the columns of `m` (modified Gram–Schmidt, applied twice).
pub fn orthonormalize_columns(m: &QMatrix) -> Option<QMatrix> {
    let mut basis: Vec<QVector> = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut v = m.column(j);
        for _ in 0..2 {
            for b in &basis {
                let c = b.inner_unchecked(&v);
                v = &v - &b.mul_right(c);
            }
        }
        let nv = v.norm();
        if nv < 1e-10 {
            return None;
        }
        basis.push(v.scale(1.0 / nv));
    }
    QMatrix::from_columns(&basis).ok()
}

pub fn random_unitary(rng: &mut QRng, n: usize) -> QMatrix {
    loop {
        if let Some(w) = orthonormalize_columns(&ginibre(rng, n)) {
            return w;
        }
    }
}

pub fn normal_with_spectrum(rng: &mut QRng, spectrum: &[Quaternion]) -> QMatrix {
    let w = random_unitary(rng, spectrum.len());
    &(&w * &QMatrix::diag(spectrum)) * &w.adjoint()
}

pub fn random_normal(rng: &mut QRng, n: usize) -> QMatrix {
    let spectrum: Vec<Quaternion> = (0..n).map(|_| rng.quaternion()).collect();
    normal_with_spectrum(rng, &spectrum)
}

pub fn partial_isometry(rng: &mut QRng, n: usize, rank: usize) -> QMatrix {
    let w1 = random_unitary(rng, n);
    let w2 = random_unitary(rng, n);
    let d: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    &(&w1 * &QMatrix::real_diag(&d)) * &w2.adjoint()
}

pub fn near_normal(rng: &mut QRng, n: usize, eps: f64) -> QMatrix {
    let base = random_normal(rng, n);
    let g = ginibre(rng, n);
    &base + &g.scale(eps)
}

/// Builds the operator(s) described by `spec`. Identical specs give
/// bit-identical output.
pub fn gen(spec: &GeneratorSpec) -> Result<Generated> {
    let n = spec.dim;
    if n == 0 || n > MAX_DIM {
        return Err(QopError::InvalidParameter(format!("dimension must be in 1..={MAX_DIM}, got {n}")));
    }
    let mut rng = QRng::new(spec.seed);
    let out = match &spec.kind {
        GeneratorKind::Ginibre => Generated::Single(ginibre(&mut rng, n)),
        GeneratorKind::Hermitian => Generated::Single(hermitian(&mut rng, n)),
        GeneratorKind::Positive => Generated::Single(positive(&mut rng, n)),
        GeneratorKind::OrderedPair => {
            let (a, b) = ordered_pair(&mut rng, n);
            Generated::Pair(a, b)
        }
        GeneratorKind::NormalWithSpectrum { spectrum } => {
            if spectrum.is_empty() {
                Generated::Single(random_normal(&mut rng, n))
            } else if spectrum.len() != n {
                return Err(QopError::DimensionMismatch(format!(
                    "spectrum has {} entries for dimension {n}",
                    spectrum.len()
                )));
            } else {
                Generated::Single(normal_with_spectrum(&mut rng, spectrum))
            }
        }
        GeneratorKind::PartialIsometry { rank } => {
            if *rank > n {
                return Err(QopError::InvalidParameter(format!("rank {rank} exceeds dimension {n}")));
            }
            Generated::Single(partial_isometry(&mut rng, n, *rank))
        }
        GeneratorKind::NearNormal { eps } => {
            if !eps.is_finite() || *eps < 0.0 {
                return Err(QopError::InvalidParameter(format!("eps must be finite and nonnegative, got {eps}")));
            }
            Generated::Single(near_normal(&mut rng, n, *eps))
        }
        GeneratorKind::Unitary => Generated::Single(random_unitary(&mut rng, n)),
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{is_psd, min_eigenvalue, spherical_point_spectrum};

    fn spec(kind: GeneratorKind, seed: u64) -> GeneratorSpec {
        GeneratorSpec { kind, dim: 3, seed }
    }

    #[test]
    fn deterministic() {
        let s = spec(GeneratorKind::Ginibre, 17);
        assert_eq!(gen(&s).unwrap(), gen(&s).unwrap());
        assert_ne!(gen(&s).unwrap(), gen(&spec(GeneratorKind::Ginibre, 18)).unwrap());
    }

    #[test]
    fn positive_and_ordered_contracts() {
        for seed in 0..50 {
            let p = gen(&spec(GeneratorKind::Positive, seed)).unwrap().single().unwrap();
            assert!(is_psd(&p, 1e-8).unwrap().0);
            match gen(&spec(GeneratorKind::OrderedPair, seed)).unwrap() {
                Generated::Pair(a, b) => {
                    assert!(min_eigenvalue(&(&a - &b)).unwrap() >= -1e-12 * a.frobenius_norm());
                    assert!(is_psd(&b, 1e-8).unwrap().0);
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn unitary_contract() {
        let u = gen(&GeneratorSpec { kind: GeneratorKind::Unitary, dim: 5, seed: 3 }).unwrap().single().unwrap();
        let uu = &u.adjoint() * &u;
        assert!(uu.max_abs_diff(&QMatrix::identity(5)) < 1e-13);
    }

    #[test]
    fn normal_with_given_spectrum() {
        let s = GeneratorSpec {
            kind: GeneratorKind::NormalWithSpectrum { spectrum: vec![Quaternion::real(2.0), Quaternion::real(3.0)] },
            dim: 2,
            seed: 5,
        };
        let t = gen(&s).unwrap().single().unwrap();
        let sp = spherical_point_spectrum(&t).unwrap();
        assert_eq!(sp.classes.len(), 2);
        assert!((sp.classes[0].re - 2.0).abs() < 1e-10 && sp.classes[0].im.abs() < 1e-10);
        assert!((sp.classes[1].re - 3.0).abs() < 1e-10 && sp.classes[1].im.abs() < 1e-10);
    }

    #[test]
    fn partial_isometry_contract() {
        let s = GeneratorSpec { kind: GeneratorKind::PartialIsometry { rank: 2 }, dim: 4, seed: 1 };
        let u = gen(&s).unwrap().single().unwrap();
        let p = &u.adjoint() * &u;
        assert!((&p * &p).max_abs_diff(&p) < 1e-13);
        assert!((p.trace().w - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(gen(&GeneratorSpec { kind: GeneratorKind::Ginibre, dim: 0, seed: 0 }).is_err());
        assert!(gen(&GeneratorSpec { kind: GeneratorKind::Ginibre, dim: 65, seed: 0 }).is_err());
        assert!(gen(&GeneratorSpec { kind: GeneratorKind::PartialIsometry { rank: 5 }, dim: 4, seed: 0 }).is_err());
    }
}
