use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{QopError, Result};
use crate::linalg::{QVector, MAX_DIM};
use crate::quaternion::Quaternion;

/// Dense row-major quaternionic matrix acting on column vectors by
/// `(T u)ᵢ = Σⱼ Tᵢⱼ uⱼ`.
///
/// Acting on the left with scalars multiplying the vector on the right makes
/// every `QMatrix` a right linear operator: `T(u p + v) = (T u) p + T v`.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(QopError::TooLarge { got: rows.max(cols), max: MAX_DIM });
        }
        if data.len() != rows * cols {
            return Err(QopError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|q| !q.is_finite()) {
            return Err(QopError::NonFinite(format!("matrix entry ({}, {})", idx / cols, idx % cols)));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(QopError::DimensionMismatch("ragged rows".into()));
        }
        QMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Real matrix given by rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&w| Quaternion::real(w)).collect()).collect())
    }

    pub(crate) fn from_vec(rows: usize, cols: usize, data: Vec<Quaternion>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        QMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn diag(d: &[Quaternion]) -> Self {
        let n = d.len();
        let mut m = QMatrix::zeros(n, n);
        for (i, &q) in d.iter().enumerate() {
            m[(i, i)] = q;
        }
        m
    }

    pub fn real_diag(d: &[f64]) -> Self {
        QMatrix::diag(&d.iter().map(|&w| Quaternion::real(w)).collect::<Vec<_>>())
    }

    /// Matrix whose columns are the given vectors (all of equal length).
    pub fn from_columns(cols: &[QVector]) -> Result<Self> {
        let n = cols.first().map_or(0, QVector::len);
        if cols.iter().any(|c| c.len() != n) {
            return Err(QopError::DimensionMismatch("columns of unequal length".into()));
        }
        let mut m = QMatrix::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = c[i];
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn column(&self, j: usize) -> QVector {
        QVector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn columns(&self) -> Vec<QVector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn require_square(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(QopError::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.rows)
    }

    /// Conjugate transpose: `adjoint(T)ᵢⱼ = conj(Tⱼᵢ)`.
    pub fn adjoint(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn matmul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(QopError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, u: &QVector) -> Result<QVector> {
        if self.cols != u.len() {
            return Err(QopError::DimensionMismatch(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                u.len()
            )));
        }
        Ok(QVector::from_vec(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self[(i, j)] * u[j]).sum())
                .collect(),
        ))
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&q| q * s).collect() }
    }

    /// Entrywise right multiplication by a quaternion, `(T q)ᵢⱼ = Tᵢⱼ q`.
    pub fn mul_right(&self, q: Quaternion) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * q).collect() }
    }

    /// Entrywise left multiplication by a quaternion, the operator `u ↦ q·(T u)`
    /// under the standard-basis left action.
    pub fn mul_left(&self, q: Quaternion) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| q * a).collect() }
    }

    pub fn trace(&self) -> Quaternion {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.max_abs()).fold(0.0, f64::max)
    }

    /// `(T + T*) / 2`.
    pub fn hermitian_part(&self) -> QMatrix {
        (self + &self.adjoint()).scale(0.5)
    }

    /// Frobenius norm of `T − T*`.
    pub fn selfadjoint_residual(&self) -> f64 {
        (self - &self.adjoint()).frobenius_norm()
    }

    /// Largest entrywise component difference.
    pub fn max_abs_diff(&self, other: &QMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (*a - *b).max_abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|q| q.is_zero())
    }

    /// `T² − T(q + q̄) + I|q|²`, the operator whose kernel defines the
    /// spherical point spectrum.
    pub fn delta(&self, q: Quaternion) -> Result<QMatrix> {
        let n = self.require_square()?;
        let t2 = self.matmul(self)?;
        let twice_re = 2.0 * q.w;
        let mut out = &t2 - &self.scale(twice_re);
        let nq = q.norm_sqr();
        for i in 0..n {
            out[(i, i)] += Quaternion::real(nq);
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert!(self.rows == o.rows && self.cols == o.cols, "matrix shape mismatch in add");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert!(self.rows == o.rows && self.cols == o.cols, "matrix shape mismatch in sub");
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.scale(-1.0)
    }
}

/// Panics on non-conformable shapes; use [`QMatrix::matmul`] for a checked product.
impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        self.matmul(o).expect("non-conformable matrix product")
    }
}

impl Mul<&QVector> for &QMatrix {
    type Output = QVector;
    fn mul(self, u: &QVector) -> QVector {
        self.matvec(u).expect("non-conformable matrix-vector product")
    }
}

/// Checked product `A·B`.
pub fn matmul(a: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    a.matmul(b)
}

/// Checked product `A·u`.
pub fn matvec(a: &QMatrix, u: &QVector) -> Result<QVector> {
    a.matvec(u)
}

pub fn adjoint(a: &QMatrix) -> QMatrix {
    a.adjoint()
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Quaternion>>,
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect();
        MatrixRepr { rows: self.rows, cols: self.cols, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(D::Error::custom(format!(
                "entries do not match declared shape {}x{}",
                repr.rows, repr.cols
            )));
        }
        QMatrix::new(repr.rows, repr.cols, repr.entries.into_iter().flatten().collect()).map_err(D::Error::custom)
    }
}
