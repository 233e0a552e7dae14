use std::ops::{Add, Index, IndexMut, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QopError, Result};
use crate::linalg::MAX_DIM;
use crate::quaternion::Quaternion;

/// Element of the right quaternionic Hilbert space `Hⁿ`.
///
/// Scalars act on the right: `(u·q)ᵢ = uᵢ q`. The inner product is
/// `⟨u, v⟩ = Σ conj(uᵢ) vᵢ`, conjugate-linear in the first slot and right
/// linear in the second.
#[derive(Clone, Debug, PartialEq)]
pub struct QVector {
    entries: Vec<Quaternion>,
}

impl QVector {
    pub fn new(entries: Vec<Quaternion>) -> Result<Self> {
        if entries.len() > MAX_DIM {
            return Err(QopError::TooLarge { got: entries.len(), max: MAX_DIM });
        }
        if let Some(i) = entries.iter().position(|q| !q.is_finite()) {
            return Err(QopError::NonFinite(format!("vector entry {i}")));
        }
        Ok(QVector { entries })
    }

    /// Unchecked constructor for internal results that are finite by construction.
    pub(crate) fn from_vec(entries: Vec<Quaternion>) -> Self {
        QVector { entries }
    }

    pub fn zeros(n: usize) -> Self {
        QVector { entries: vec![Quaternion::ZERO; n] }
    }

    /// Standard basis vector `e_i` (zero-based index).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = QVector::zeros(n);
        v.entries[i] = Quaternion::ONE;
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        QVector { entries: values.iter().map(|&w| Quaternion::real(w)).collect() }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Quaternion> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Quaternion> {
        self.entries.iter()
    }

    fn check_same_len(&self, other: &QVector) -> Result<()> {
        if self.len() != other.len() {
            return Err(QopError::DimensionMismatch(format!(
                "vectors of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    /// `⟨self, other⟩ = Σ conj(selfᵢ) otherᵢ`.
    pub fn inner(&self, other: &QVector) -> Result<Quaternion> {
        self.check_same_len(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &QVector) -> Quaternion {
        self.entries.iter().zip(&other.entries).map(|(a, b)| a.conj() * *b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|q| q.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Right scalar action `u·q`.
    pub fn mul_right(&self, q: Quaternion) -> QVector {
        QVector { entries: self.entries.iter().map(|&a| a * q).collect() }
    }

    /// Left scalar multiplication induced by the standard basis:
    /// `q·u = Σ_z z q ⟨z, u⟩`, which for `z = e_i` is `(q uᵢ)ᵢ`.
    pub fn left_scalar_mul(&self, q: Quaternion) -> QVector {
        QVector { entries: self.entries.iter().map(|&a| q * a).collect() }
    }

    pub fn scale(&self, s: f64) -> QVector {
        QVector { entries: self.entries.iter().map(|&a| a * s).collect() }
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<QVector> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }

    /// Multiplies on the right by the unit quaternion that makes the
    /// largest-magnitude entry real and positive (ties go to the lowest index).
    /// Gives a canonical representative of the ray `{u q : |q| = 1}`.
    pub fn phase_normalized(&self) -> QVector {
        let mut best = 0;
        let mut best_norm = -1.0;
        for (i, q) in self.entries.iter().enumerate() {
            let n = q.norm();
            if n > best_norm * (1.0 + 1e-9) {
                best = i;
                best_norm = n;
            }
        }
        if best_norm <= 0.0 {
            return self.clone();
        }
        let phase = self.entries[best].conj() / best_norm;
        self.mul_right(phase)
    }

    pub fn max_abs_diff(&self, other: &QVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max)
    }
}

/// Free-function form of [`QVector::inner`].
pub fn inner(u: &QVector, v: &QVector) -> Result<Quaternion> {
    u.inner(v)
}

/// Free-function form of [`QVector::left_scalar_mul`].
pub fn left_scalar_mul(q: Quaternion, u: &QVector) -> QVector {
    u.left_scalar_mul(q)
}

impl Index<usize> for QVector {
    type Output = Quaternion;
    fn index(&self, i: usize) -> &Quaternion {
        &self.entries[i]
    }
}

impl IndexMut<usize> for QVector {
    fn index_mut(&mut self, i: usize) -> &mut Quaternion {
        &mut self.entries[i]
    }
}

impl Add for &QVector {
    type Output = QVector;
    fn add(self, o: &QVector) -> QVector {
        assert_eq!(self.len(), o.len(), "vector length mismatch");
        QVector { entries: self.entries.iter().zip(&o.entries).map(|(a, b)| *a + *b).collect() }
    }
}

impl Sub for &QVector {
    type Output = QVector;
    fn sub(self, o: &QVector) -> QVector {
        assert_eq!(self.len(), o.len(), "vector length mismatch");
        QVector { entries: self.entries.iter().zip(&o.entries).map(|(a, b)| *a - *b).collect() }
    }
}

impl Neg for &QVector {
    type Output = QVector;
    fn neg(self) -> QVector {
        QVector { entries: self.entries.iter().map(|a| -*a).collect() }
    }
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    n: usize,
    entries: Vec<Quaternion>,
}

impl Serialize for QVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorRepr { n: self.len(), entries: self.entries.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = VectorRepr::deserialize(d)?;
        if repr.entries.len() != repr.n {
            return Err(serde::de::Error::custom(format!(
                "vector declares n = {} but has {} entries",
                repr.n,
                repr.entries.len()
            )));
        }
        QVector::new(repr.entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;

    #[test]
    fn inner_examples() {
        let e1 = QVector::basis(2, 0);
        assert_eq!(e1.inner(&e1).unwrap(), Quaternion::ONE);
        let u = e1.mul_right(I);
        let v = e1.mul_right(J);
        assert_eq!(u.inner(&v).unwrap(), -K);
        assert!(e1.inner(&QVector::zeros(3)).is_err());
    }

    #[test]
    fn inner_is_right_linear_in_second_slot() {
        let u = QVector::new(vec![Quaternion::new(1.0, 2.0, 0.5, -1.0), Quaternion::new(0.0, 1.0, 3.0, 2.0)]).unwrap();
        let v = QVector::new(vec![Quaternion::new(-1.0, 0.5, 2.0, 1.0), Quaternion::new(2.0, 0.0, -1.0, 1.0)]).unwrap();
        let w = QVector::new(vec![Quaternion::new(0.3, 0.1, 0.0, 2.0), Quaternion::new(1.0, 1.0, 1.0, 1.0)]).unwrap();
        let p = Quaternion::new(0.5, -1.0, 2.0, 0.25);
        let q = Quaternion::new(-2.0, 0.0, 1.0, 1.5);
        let lhs = u.inner(&(&v.mul_right(p) + &w.mul_right(q))).unwrap();
        let rhs = u.inner(&v).unwrap() * p + u.inner(&w).unwrap() * q;
        assert!(lhs.approx_eq(rhs, 1e-13));
        let a = u.inner(&v).unwrap();
        let b = v.inner(&u).unwrap();
        assert!(a.approx_eq(b.conj(), 1e-14));
    }

    #[test]
    fn left_scalar_mul_examples() {
        let u = QVector::new(vec![Quaternion::new(1.0, 2.0, 3.0, 4.0), K]).unwrap();
        assert_eq!(u.left_scalar_mul(Quaternion::ONE), u);
        let v = QVector::basis(1, 0).mul_right(I);
        assert_eq!(left_scalar_mul(J, &v)[0], -K);
        let r = Quaternion::real(2.5);
        assert_eq!(u.left_scalar_mul(r), u.mul_right(r));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(QVector::new(vec![Quaternion::new(f64::NAN, 0.0, 0.0, 0.0)]).is_err());
        assert!(serde_json::from_str::<QVector>(r#"{"n":2,"entries":[[1,0,0,0]]}"#).is_err());
    }

    #[test]
    fn json_shape() {
        let u = QVector::basis(2, 1);
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(s, r#"{"n":2,"entries":[[0.0,0.0,0.0,0.0],[1.0,0.0,0.0,0.0]]}"#);
        assert_eq!(serde_json::from_str::<QVector>(&s).unwrap(), u);
    }
}
