use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QopError, Result};
use crate::linalg::{operator_norm, QMatrix};
use crate::spectral::{fun_calc, spherical_point_spectrum};

#[derive(Clone, Debug, Serialize)]
pub struct ProductCheck {
    /// Hausdorff distance between `σ_S(ST) ∪ {0}` and `σ_S(TS) ∪ {0}`.
    pub hausdorff: f64,
    /// `|r_S(ST) − r_S(TS)|`.
    pub radius_diff: f64,
    /// `max(1, ‖S‖‖T‖)`.
    pub scale: f64,
}

/// Hausdorff distance between two sets of class representatives after
/// adjoining `0` to each.
pub fn hausdorff_with_zero(a: &[Complex64], b: &[Complex64]) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    let with_zero = |v: &[Complex64]| -> Vec<Complex64> {
        let mut out = v.to_vec();
        out.push(zero);
        out
    };
    let (a, b) = (with_zero(a), with_zero(b));
    let directed = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(&a, &b).max(directed(&b, &a))
}

/// Compares the spherical spectra of `ST` and `TS`.
pub fn spectrum_product_check(s: &QMatrix, t: &QMatrix) -> Result<ProductCheck> {
    let st = s.matmul(t)?;
    let ts = t.matmul(s)?;
    let a = spherical_point_spectrum(&st)?;
    let b = spherical_point_spectrum(&ts)?;
    Ok(ProductCheck {
        hausdorff: hausdorff_with_zero(&a.classes, &b.classes),
        radius_diff: (a.radius - b.radius).abs(),
        scale: (operator_norm(s) * operator_norm(t)).max(1.0),
    })
}

/// `‖f(USU*) − U f(S) U*‖` for unitary `U` and selfadjoint `S`.
pub fn conjugation_lemma_residual<F: Fn(f64) -> f64 + Copy>(u: &QMatrix, s: &QMatrix, f: F) -> Result<f64> {
    let n = u.require_square()?;
    let defect = (&u.adjoint() * u).max_abs_diff(&QMatrix::identity(n));
    if defect > 1e-8 {
        return Err(QopError::Precondition(format!("U is not unitary (defect {defect:e})")));
    }
    let conj = u.matmul(s)?.matmul(&u.adjoint())?.hermitian_part();
    let lhs = fun_calc(&conj, f)?;
    let rhs = &(u * &fun_calc(s, f)?) * &u.adjoint();
    Ok(operator_norm(&(&lhs - &rhs)))
}
