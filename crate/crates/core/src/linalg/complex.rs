//! Complex adjoint representation.
//!
//! Writing `A = A₁ + A₂ j` with complex `A₁, A₂`, the embedding is
//!
//! ```text
//! χ(A) = [  A₁        A₂      ]
//!        [ −conj(A₂)  conj(A₁) ]
//! ```
//!
//! which is a unital *-homomorphism from `n×n` quaternionic matrices into
//! `2n×2n` complex matrices. A quaternionic vector `v = v₁ + v₂ j` maps to
//! the complex column `[v₁; −conj(v₂)]`; under this map `χ(A)` acts exactly
//! like `A`, and a complex eigenpair `χ(A) z = z λ` pulls back to a right
//! eigenpair `A v = v λ` with `λ` read as a quaternion.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{QopError, Result};
use crate::linalg::{QMatrix, QVector};
use crate::quaternion::Quaternion;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix, the workspace for `χ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(QopError::DimensionMismatch(format!(
                "{rows}x{cols} complex matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(QopError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Residual of the symplectic symmetry `J·conj(M)·J⁻¹ = M`, measured as the
    /// Frobenius norm of the block mismatch.
    pub fn symplectic_residual(&self) -> f64 {
        if self.rows != self.cols || !self.rows.is_multiple_of(2) {
            return f64::INFINITY;
        }
        let n = self.rows / 2;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a1 = self[(i, j)];
                let a2 = self[(i, j + n)];
                acc += (self[(i + n, j)] + a2.conj()).norm_sqr();
                acc += (self[(i + n, j + n)] - a1.conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `χ(A)` for a rectangular `n×m` quaternionic matrix (result is `2n×2m`).
pub fn embed_chi(a: &QMatrix) -> ComplexMatrix {
    let (n, m) = (a.rows(), a.cols());
    let mut out = ComplexMatrix::zeros(2 * n, 2 * m);
    for i in 0..n {
        for j in 0..m {
            let (a1, a2) = a[(i, j)].to_complex_pair();
            out[(i, j)] = a1;
            out[(i, j + m)] = a2;
            out[(i + n, j)] = -a2.conj();
            out[(i + n, j + m)] = a1.conj();
        }
    }
    out
}

/// Inverse of [`embed_chi`]. Rejects matrices whose symplectic residual exceeds
/// `1e−8` relative to their Frobenius norm (floored at one).
pub fn unembed_chi(m: &ComplexMatrix) -> Result<QMatrix> {
    if !m.rows().is_multiple_of(2) || !m.cols().is_multiple_of(2) {
        return Err(QopError::DimensionMismatch(format!(
            "complex matrix {}x{} has odd dimension",
            m.rows(),
            m.cols()
        )));
    }
    let (n, k) = (m.rows() / 2, m.cols() / 2);
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..k {
            let a1 = m[(i, j)];
            let a2 = m[(i, j + k)];
            acc += (m[(i + n, j)] + a2.conj()).norm_sqr();
            acc += (m[(i + n, j + k)] - a1.conj()).norm_sqr();
        }
    }
    let residual = acc.sqrt();
    if !(residual <= 1e-8 * m.frobenius_norm().max(1.0)) {
        return Err(QopError::Structure(residual));
    }
    let mut data = Vec::with_capacity(n * k);
    for i in 0..n {
        for j in 0..k {
            data.push(Quaternion::from_complex_pair(m[(i, j)], m[(i, j + k)]));
        }
    }
    QMatrix::new(n, k, data)
}

/// Complex image `[v₁; −conj(v₂)]` of `v = v₁ + v₂ j`.
pub fn embed_vector(v: &QVector) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![ZERO; 2 * n];
    for (i, q) in v.iter().enumerate() {
        let (a, b) = q.to_complex_pair();
        out[i] = a;
        out[i + n] = -b.conj();
    }
    out
}

/// Pulls a complex `2n`-vector back to `Hⁿ` using its first-column reading.
pub fn unembed_vector(z: &[Complex64]) -> QVector {
    let n = z.len() / 2;
    QVector::from_vec((0..n).map(|i| Quaternion::from_complex_pair(z[i], -z[i + n].conj())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_embeds_to_identity() {
        assert_eq!(embed_chi(&QMatrix::identity(2)), ComplexMatrix::identity(4));
    }

    #[test]
    fn j_embeds_to_rotation() {
        let a = QMatrix::from_rows(vec![vec![Quaternion::J]]).unwrap();
        let m = embed_chi(&a);
        let expected = ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, -ONE, ZERO]).unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn roundtrip_exact() {
        let a = QMatrix::from_rows(vec![
            vec![Quaternion::new(1.0, -2.0, 3.5, 0.25), Quaternion::new(0.0, 1.0, -1.0, 2.0)],
            vec![Quaternion::new(-0.5, 0.0, 0.0, 7.0), Quaternion::new(4.0, 3.0, 2.0, 1.0)],
        ])
        .unwrap();
        assert_eq!(unembed_chi(&embed_chi(&a)).unwrap(), a);
    }

    #[test]
    fn structure_violation_rejected() {
        let mut m = embed_chi(&QMatrix::identity(2));
        m[(3, 0)] = Complex64::new(0.5, 0.0);
        assert!(matches!(unembed_chi(&m), Err(QopError::Structure(_))));
        assert!(unembed_chi(&ComplexMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn vector_embedding_intertwines() {
        let a = QMatrix::from_rows(vec![
            vec![Quaternion::new(1.0, 2.0, 3.0, 4.0), Quaternion::new(0.0, 1.0, 0.0, -1.0)],
            vec![Quaternion::new(2.0, 0.0, 1.0, 0.0), Quaternion::new(-1.0, 0.5, 0.5, 0.5)],
        ])
        .unwrap();
        let v = QVector::new(vec![Quaternion::new(0.5, -1.0, 2.0, 1.0), Quaternion::new(1.0, 1.0, 0.0, 3.0)]).unwrap();
        let z = embed_vector(&v);
        let chi = embed_chi(&a);
        let mut chi_z = vec![ZERO; 4];
        for i in 0..4 {
            for j in 0..4 {
                chi_z[i] += chi[(i, j)] * z[j];
            }
        }
        let av = a.matvec(&v).unwrap();
        let back = unembed_vector(&chi_z);
        assert!(back.max_abs_diff(&av) < 1e-13);
        assert_eq!(unembed_vector(&z), v);
    }
}
