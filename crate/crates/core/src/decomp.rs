//! Polar decomposition `T = U|T|` and the transforms built from it.
//!
//! `|T| = (T*T)^{1/2}` comes from the Hermitian eigensystem of `T*T`.
//! Eigenvalues of `T*T` at or below `τ·λ_max` (`τ = 1e−12`) are treated as
//! kernel: they are zeroed in every power of `|T|` and `U` vanishes on their
//! span, so `U` is a genuine partial isometry from `ker(T)^⊥` onto `ran(T)`.
//! A unitary extension is available through [`unitary_completion`].

use serde::Serialize;

use crate::error::{QopError, Result};
use crate::linalg::{QMatrix, QVector};
use crate::spectral::{clamp_nonnegative, hermitian_eig, pow0, HermitianEigensystem};

/// Relative threshold on eigenvalues of `T*T` (squared singular values)
/// separating kernel from range.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct PolarParts {
    /// Partial isometry, zero on `ker |T|`.
    pub u: QMatrix,
    /// `|T| = (T*T)^{1/2}`.
    pub abs_t: QMatrix,
    /// Numerical rank of `|T|`.
    pub rank: usize,
    /// Rank threshold used, relative to the largest eigenvalue of `T*T`.
    pub tau: f64,
    t: QMatrix,
    gram: HermitianEigensystem,
    /// Singular values aligned with `gram.eigenvectors`, zero on the kernel.
    sigma: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarCheck {
    /// `‖U|T| − T‖_F / max(1, ‖T‖_F)`.
    pub reconstruction: f64,
    /// `‖V_r* U* U V_r − I‖` over an orthonormal basis `V_r` of `ker(|T|)^⊥`.
    pub isometry_defect: f64,
    /// `max ‖U k‖` over kernel basis vectors `k`.
    pub kernel_leak: f64,
    /// `max ‖T k‖ / max(1, ‖T‖)` over kernel basis vectors of `|T|`.
    pub kernel_mismatch: f64,
}

impl PolarParts {
    pub fn n(&self) -> usize {
        self.t.rows()
    }

    pub fn operator(&self) -> &QMatrix {
        &self.t
    }

    /// Singular values in ascending order, zero on the numerical kernel.
    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn kernel_basis(&self) -> Vec<QVector> {
        let n = self.n();
        (0..n - self.rank).map(|k| self.gram.eigenvectors.column(k)).collect()
    }

    pub fn range_basis(&self) -> Vec<QVector> {
        let n = self.n();
        (n - self.rank..n).map(|k| self.gram.eigenvectors.column(k)).collect()
    }

    /// `|T|^t` with `|T|⁰ = I`.
    pub(crate) fn abs_power_unchecked(&self, t: f64) -> QMatrix {
        let vals: Vec<f64> = self.sigma.iter().map(|&s| pow0(s, t)).collect();
        self.gram.synthesize(&vals)
    }

    /// `|T|^t` for `t > 0`.
    pub fn abs_power(&self, t: f64) -> Result<QMatrix> {
        check_positive_exponent(t)?;
        Ok(self.abs_power_unchecked(t))
    }

    /// `|T*|^t` computed as `U|T|^tU*`.
    pub fn abs_star_power(&self, t: f64) -> Result<QMatrix> {
        let p = self.abs_power(t)?;
        Ok((&(&self.u * &p) * &self.u.adjoint()).hermitian_part())
    }

    pub fn check(&self) -> PolarCheck {
        let tnorm = self.t.frobenius_norm().max(1.0);
        let reconstruction = (&(&self.u * &self.abs_t) - &self.t).frobenius_norm() / tnorm;
        let range = self.range_basis();
        let isometry_defect = if range.is_empty() {
            0.0
        } else {
            let vr = QMatrix::from_columns(&range).expect("equal lengths");
            let uvr = &self.u * &vr;
            (&uvr.adjoint() * &uvr).max_abs_diff(&QMatrix::identity(range.len()))
        };
        let kernel = self.kernel_basis();
        let kernel_leak = kernel.iter().map(|k| (&self.u * k).norm()).fold(0.0, f64::max);
        let kernel_mismatch = kernel.iter().map(|k| (&self.t * k).norm()).fold(0.0, f64::max) / tnorm;
        PolarCheck { reconstruction, isometry_defect, kernel_leak, kernel_mismatch }
    }
}

fn check_positive_exponent(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(QopError::InvalidParameter(format!("exponent must be positive, got {t}")));
    }
    Ok(())
}

/// Kernel split of a positive eigensystem: the count of eigenvalues at or
/// below `RANK_TOL·λ_max`, and the clamped eigenvalues.
fn kernel_split(eig: &HermitianEigensystem) -> Result<(usize, Vec<f64>)> {
    let lambda = clamp_nonnegative(eig)?;
    let max = lambda.iter().copied().fold(0.0, f64::max);
    let cut = RANK_TOL * max;
    let nullity = lambda.iter().take_while(|&&l| max == 0.0 || l <= cut).count();
    Ok((nullity, lambda))
}

pub fn polar(t: &QMatrix) -> Result<PolarParts> {
    let n = t.require_square()?;
    let gram_m = (&t.adjoint() * t).hermitian_part();
    let gram = hermitian_eig(&gram_m)?;
    let (nullity, lambda) = kernel_split(&gram)?;
    let sigma: Vec<f64> = lambda
        .iter()
        .enumerate()
        .map(|(k, &l)| if k < nullity { 0.0 } else { l.sqrt() })
        .collect();
    let rank = n - nullity;

    let abs_t = gram.synthesize(&sigma);
    // U = T·|T|⁺
    let inv: Vec<f64> = sigma.iter().map(|&s| if s > 0.0 { 1.0 / s } else { 0.0 }).collect();
    let pinv = gram.synthesize(&inv);
    let u = t * &pinv;

    Ok(PolarParts { u, abs_t, rank, tau: RANK_TOL, t: t.clone(), gram, sigma })
}

/// `|T|^t` for `t > 0`.
pub fn abs_power(parts: &PolarParts, t: f64) -> Result<QMatrix> {
    parts.abs_power(t)
}

/// `(TT*)^{t/2}` computed directly from the eigensystem of `TT*`, with the
/// same kernel threshold as [`polar`]. Independent route to `|T*|^t`.
pub fn abs_star_power_direct(t: &QMatrix, exponent: f64) -> Result<QMatrix> {
    check_positive_exponent(exponent)?;
    let eig = hermitian_eig(&(t * &t.adjoint()).hermitian_part())?;
    let (nullity, lambda) = kernel_split(&eig)?;
    let vals: Vec<f64> = lambda
        .iter()
        .enumerate()
        .map(|(k, &l)| if k < nullity { 0.0 } else { l.powf(exponent / 2.0) })
        .collect();
    Ok(eig.synthesize(&vals))
}

/// `‖|T*|^t − U|T|^tU*‖_F`, both sides computed independently.
pub fn abs_star_identity_residual(parts: &PolarParts, t: f64) -> Result<f64> {
    let via_u = parts.abs_star_power(t)?;
    let direct = abs_star_power_direct(parts.operator(), t)?;
    Ok((&via_u - &direct).frobenius_norm())
}

/// Extends the partial isometry to a unitary by sending the kernel basis of
/// `|T|` to the kernel basis of `T*`, pairing them in index order.
pub fn unitary_completion(parts: &PolarParts) -> Result<QMatrix> {
    let t = parts.operator();
    let co_eig = hermitian_eig(&(t * &t.adjoint()).hermitian_part())?;
    let (co_nullity, _) = kernel_split(&co_eig)?;
    let kernel = parts.kernel_basis();
    if kernel.len() != co_nullity {
        return Err(QopError::Precondition(format!(
            "dim ker T = {} but dim ker T* = {co_nullity}; no unitary completion",
            kernel.len()
        )));
    }
    let mut w = parts.u.clone();
    let n = parts.n();
    for (idx, k) in kernel.iter().enumerate() {
        let c = co_eig.eigenvectors.column(idx);
        for i in 0..n {
            for j in 0..n {
                w[(i, j)] += c[i] * k[j].conj();
            }
        }
    }
    Ok(w)
}

/// `T̃ = |T|^{1/2} U |T|^{1/2}`.
pub fn aluthge(t: &QMatrix) -> Result<QMatrix> {
    Ok(aluthge_with(&polar(t)?))
}

pub fn aluthge_with(parts: &PolarParts) -> QMatrix {
    lambda_aluthge_unchecked(parts, 0.5)
}

fn lambda_aluthge_unchecked(parts: &PolarParts, lambda: f64) -> QMatrix {
    let left = parts.abs_power_unchecked(lambda);
    let right = parts.abs_power_unchecked(1.0 - lambda);
    &(&left * &parts.u) * &right
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(QopError::InvalidParameter(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

/// `Δ_λ(T) = |T|^λ U |T|^{1−λ}` for `λ ∈ [0, 1]`.
pub fn lambda_aluthge(t: &QMatrix, lambda: f64) -> Result<QMatrix> {
    check_lambda(lambda)?;
    Ok(lambda_aluthge_unchecked(&polar(t)?, lambda))
}

pub fn lambda_aluthge_with(parts: &PolarParts, lambda: f64) -> Result<QMatrix> {
    check_lambda(lambda)?;
    Ok(lambda_aluthge_unchecked(parts, lambda))
}

/// Duggal transform `|T| U`.
pub fn duggal(t: &QMatrix) -> Result<QMatrix> {
    Ok(duggal_with(&polar(t)?))
}

pub fn duggal_with(parts: &PolarParts) -> QMatrix {
    &parts.abs_t * &parts.u
}

/// `S_r(T) = U |T|^r U` for `r > 0`.
pub fn furuta_sr(t: &QMatrix, r: f64) -> Result<QMatrix> {
    furuta_sr_with(&polar(t)?, r)
}

pub fn furuta_sr_with(parts: &PolarParts, r: f64) -> Result<QMatrix> {
    let p = parts.abs_power(r)?;
    Ok(&(&parts.u * &p) * &parts.u)
}

/// Transform selector used by the command line: `aluthge`, `duggal`,
/// `lambda:<x>` or `sr:<r>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransformKind {
    Aluthge,
    Duggal,
    Lambda(f64),
    Sr(f64),
}

impl std::str::FromStr for TransformKind {
    type Err = QopError;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| QopError::InvalidParameter(format!("bad transform parameter {v:?}")))
        };
        match s {
            "aluthge" => Ok(TransformKind::Aluthge),
            "duggal" => Ok(TransformKind::Duggal),
            _ => match s.split_once(':') {
                Some(("lambda", v)) => Ok(TransformKind::Lambda(parse(v)?)),
                Some(("sr", v)) => Ok(TransformKind::Sr(parse(v)?)),
                _ => Err(QopError::InvalidParameter(format!("unknown transform {s:?}"))),
            },
        }
    }
}

pub fn transform(t: &QMatrix, kind: TransformKind) -> Result<QMatrix> {
    match kind {
        TransformKind::Aluthge => aluthge(t),
        TransformKind::Duggal => duggal(t),
        TransformKind::Lambda(l) => lambda_aluthge(t, l),
        TransformKind::Sr(r) => furuta_sr(t, r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::{ginibre, partial_isometry, positive, random_unitary};
    use crate::harness::rng::QRng;
    use crate::quaternion::Quaternion;

    const I: Quaternion = Quaternion::I;
    const O: Quaternion = Quaternion::ZERO;

    fn jordan() -> QMatrix {
        QMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    #[test]
    fn unitary_input() {
        let mut rng = QRng::new(1);
        let w = random_unitary(&mut rng, 3);
        let p = polar(&w).unwrap();
        assert!(p.u.max_abs_diff(&w) < 1e-12);
        assert!(p.abs_t.max_abs_diff(&QMatrix::identity(3)) < 1e-12);
        assert_eq!(p.rank, 3);
    }

    #[test]
    fn hand_computed_rank_one() {
        let t = QMatrix::from_rows(vec![vec![O, I * 2.0], vec![O, O]]).unwrap();
        let p = polar(&t).unwrap();
        assert_eq!(p.rank, 1);
        assert!(p.abs_t.max_abs_diff(&QMatrix::real_diag(&[0.0, 2.0])) < 1e-14);
        let u = QMatrix::from_rows(vec![vec![O, I], vec![O, O]]).unwrap();
        assert!(p.u.max_abs_diff(&u) < 1e-14);
        assert!(p.abs_power(2.0).unwrap().max_abs_diff(&QMatrix::real_diag(&[0.0, 4.0])) < 1e-14);
        assert!(p.abs_power(1.0).unwrap().max_abs_diff(&p.abs_t) < 1e-15);
        assert!(p.abs_star_power(1.0).unwrap().max_abs_diff(&QMatrix::real_diag(&[2.0, 0.0])) < 1e-14);
        assert!(abs_star_identity_residual(&p, 0.5).unwrap() < 1e-14);
        assert!(p.abs_power(0.0).is_err());
        assert!(p.abs_power(-1.0).is_err());
    }

    #[test]
    fn positive_input() {
        let mut rng = QRng::new(2);
        let t = positive(&mut rng, 3);
        let p = polar(&t).unwrap();
        assert!(p.u.max_abs_diff(&QMatrix::identity(3)) < 1e-9);
        assert!(p.abs_t.max_abs_diff(&t) < 1e-10 * t.max_abs());
    }

    #[test]
    fn random_invariants() {
        let mut rng = QRng::new(3);
        for n in 1..=6 {
            let t = ginibre(&mut rng, n);
            let c = polar(&t).unwrap().check();
            assert!(c.reconstruction < 1e-12, "{c:?}");
            assert!(c.isometry_defect < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn rank_deficient_invariants() {
        let mut rng = QRng::new(4);
        let g = ginibre(&mut rng, 4);
        let p = partial_isometry(&mut rng, 4, 2);
        let t = &g * &p;
        let parts = polar(&t).unwrap();
        assert_eq!(parts.rank, 2);
        let c = parts.check();
        assert!(c.reconstruction < 1e-12, "{c:?}");
        assert!(c.isometry_defect < 1e-10, "{c:?}");
        assert!(c.kernel_leak < 1e-9, "{c:?}");
        assert!(c.kernel_mismatch < 1e-12, "{c:?}");
        let w = unitary_completion(&parts).unwrap();
        assert!((&w.adjoint() * &w).max_abs_diff(&QMatrix::identity(4)) < 1e-10);
        assert!((&w * &parts.abs_t).max_abs_diff(&t) < 1e-10 * t.max_abs());
    }

    #[test]
    fn jordan_block_transforms() {
        let n = jordan();
        assert!(aluthge(&n).unwrap().max_abs() < 1e-12);
        assert!(lambda_aluthge(&n, 0.5).unwrap().max_abs() < 1e-12);
        assert!(lambda_aluthge(&n, 1.0).unwrap().max_abs() < 1e-12);
        assert!(duggal(&n).unwrap().max_abs() < 1e-12);
        assert!(lambda_aluthge(&n, 0.0).unwrap().max_abs_diff(&n) < 1e-14);
        assert!(furuta_sr(&n, 0.5).unwrap().max_abs() < 1e-12);
        assert!(lambda_aluthge(&n, 1.5).is_err());
        assert!(furuta_sr(&n, 0.0).is_err());
    }

    #[test]
    fn transforms_on_unitary_and_positive() {
        let mut rng = QRng::new(5);
        let w = random_unitary(&mut rng, 3);
        assert!(aluthge(&w).unwrap().max_abs_diff(&w) < 1e-12);
        assert!(furuta_sr(&w, 0.7).unwrap().max_abs_diff(&(&w * &w)) < 1e-12);
        let p = positive(&mut rng, 3);
        let scale = p.max_abs();
        assert!(aluthge(&p).unwrap().max_abs_diff(&p) < 1e-9 * scale);
        assert!(furuta_sr(&p, 1.0).unwrap().max_abs_diff(&p) < 1e-9 * scale);
        let t = ginibre(&mut rng, 3);
        let parts = polar(&t).unwrap();
        assert!(lambda_aluthge_with(&parts, 0.5).unwrap().max_abs_diff(&aluthge_with(&parts)) < 1e-14);
        assert!(lambda_aluthge_with(&parts, 1.0).unwrap().max_abs_diff(&duggal_with(&parts)) < 1e-12);
    }

    #[test]
    fn transform_kind_parsing() {
        assert_eq!("aluthge".parse::<TransformKind>().unwrap(), TransformKind::Aluthge);
        assert_eq!("duggal".parse::<TransformKind>().unwrap(), TransformKind::Duggal);
        assert_eq!("lambda:0.25".parse::<TransformKind>().unwrap(), TransformKind::Lambda(0.25));
        assert_eq!("sr:2".parse::<TransformKind>().unwrap(), TransformKind::Sr(2.0));
        assert!("lambda:x".parse::<TransformKind>().is_err());
        assert!("nope".parse::<TransformKind>().is_err());
    }
}
