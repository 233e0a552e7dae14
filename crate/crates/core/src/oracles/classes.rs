use serde::Serialize;

use crate::error::{QopError, Result};
use crate::harness::rng::QRng;
use crate::linalg::{operator_norm, QMatrix, QVector};
use crate::oracles::{scale_of, Margin, Witness};
use crate::decomp::abs_star_power_direct;
use crate::spectral::hermitian_eig;

/// Number of grid points for the λ-scan in the paranormality test.
pub const PARANORMAL_GRID: usize = 256;
const REFINE_ITERS: usize = 60;
const DEFAULT_PARANORMAL_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClassFlag {
    pub holds: bool,
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BasicClassification {
    pub selfadjoint: ClassFlag,
    /// Residual is the smallest eigenvalue of the Hermitian part.
    pub positive: ClassFlag,
    pub normal: ClassFlag,
    pub unitary: ClassFlag,
    pub threshold: f64,
}

/// Selfadjoint, positive, normal and unitary flags; every residual is
/// compared against `tol·max(1, ‖T‖)²`.
pub fn classify_basic(t: &QMatrix, tol: f64) -> Result<BasicClassification> {
    let n = t.require_square()?;
    let scale = scale_of(t);
    let threshold = tol * scale * scale;
    let ts = t.adjoint();
    let sa_res = operator_norm(&(t - &ts));
    let selfadjoint = ClassFlag { holds: sa_res <= threshold, residual: sa_res };
    let min_eig = hermitian_eig(&t.hermitian_part())?.min();
    let positive = ClassFlag { holds: selfadjoint.holds && min_eig >= -threshold, residual: min_eig };
    let tst = &ts * t;
    let normal_res = operator_norm(&(&tst - &(t * &ts)));
    let normal = ClassFlag { holds: normal_res <= threshold, residual: normal_res };
    let unitary_res = operator_norm(&(&tst - &QMatrix::identity(n)));
    let unitary = ClassFlag { holds: unitary_res <= threshold, residual: unitary_res };
    Ok(BasicClassification { selfadjoint, positive, normal, unitary, threshold })
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(QopError::InvalidParameter(format!("p must lie in (0, 1], got {p}")));
    }
    Ok(())
}

/// `(T*T)^p` and `(TT*)^p`. Fractional powers zero the eigenvalues under the
/// polar kernel threshold, otherwise roundoff in a kernel of size `ε` turns
/// into `ε^p`.
fn gram_powers(t: &QMatrix, p: f64) -> Result<(QMatrix, QMatrix)> {
    let ts = t.adjoint();
    if p == 1.0 {
        Ok(((&ts * t).hermitian_part(), (t * &ts).hermitian_part()))
    } else {
        Ok((abs_star_power_direct(&ts, 2.0 * p)?, abs_star_power_direct(t, 2.0 * p)?))
    }
}

/// Smallest eigenvalue of `(T*T)^p − (TT*)^p` with its eigenvector as
/// witness. Tolerance `tol·max(1, ‖T‖)^{2p}`.
pub fn is_p_hyponormal(t: &QMatrix, p: f64, tol: f64) -> Result<Margin> {
    t.require_square()?;
    check_p(p)?;
    let (left, right) = gram_powers(t, p)?;
    let eig = hermitian_eig(&(&left - &right).hermitian_part())?;
    let tolerance = tol * scale_of(t).powf(2.0 * p);
    let x = eig.eigenvectors.column(0).phase_normalized();
    Ok(Margin::new(eig.min(), tolerance).with_witness(Witness::Vector { x }))
}

#[derive(Clone, Debug, Serialize)]
pub struct CollapseReport {
    pub p: f64,
    /// `‖T*T − TT*‖`.
    pub normality_residual: f64,
    /// `|tr (T*T)^p − tr (TT*)^p|`.
    pub trace_residual: f64,
    pub margin: Margin,
}

/// Trace identity and p-hyponormal margin for one exponent. In finite
/// dimensions an exactly p-hyponormal operator is normal: the difference
/// `(T*T)^p − (TT*)^p` is positive with zero trace.
pub fn collapse_check(t: &QMatrix, p: f64, tol: f64) -> Result<CollapseReport> {
    check_p(p)?;
    let ts = t.adjoint();
    let normality_residual = operator_norm(&(&(&ts * t) - &(t * &ts)));
    let (left, right) = gram_powers(t, p)?;
    let trace_residual = (left.trace().w - right.trace().w).abs();
    let margin = is_p_hyponormal(t, p, tol)?;
    Ok(CollapseReport { p, normality_residual, trace_residual, margin })
}

#[derive(Clone, Debug, Serialize)]
pub struct ParanormalReport {
    /// `min_λ λ_min(T*²T² − 2λT*T + λ²I)`; witness is `(λ*, eigenvector)`.
    pub lambda_margin: Margin,
    /// `min_x ‖T²x‖‖x‖ − ‖Tx‖²` over unit vectors: standard basis, the λ-route
    /// eigenvector, then `samples` random vectors. Negative values are
    /// certified by the witness vector.
    pub vector_margin: Margin,
    pub samples: usize,
    pub seed: u64,
}

fn paranormal_gap(t: &QMatrix, x: &QVector) -> f64 {
    let tx = t * x;
    let ttx = t * &tx;
    ttx.norm() * x.norm() - tx.norm_sqr()
}

/// Paranormality via both routes. `T` is paranormal iff the quadratic
/// `λ ↦ T*²T² − 2λT*T + λ²I` is positive for every `λ > 0`, and iff the
/// vector inequality holds at every `x`; a negative eigenvalue at `λ`
/// yields a violating eigenvector, so the routes agree on failures.
pub fn paranormal_report(t: &QMatrix, tol: f64, samples: usize, seed: u64) -> Result<ParanormalReport> {
    let n = t.require_square()?;
    let scale = scale_of(t);
    let t2 = t * t;
    let a2 = (&t2.adjoint() * &t2).hermitian_part();
    let g = (&t.adjoint() * t).hermitian_part();
    let norm_sq = operator_norm(t).powi(2);

    let eval = |lambda: f64| -> Result<(f64, QVector)> {
        let m = &(&a2 - &g.scale(2.0 * lambda)) + &QMatrix::real_diag(&vec![lambda * lambda; n]);
        let eig = hermitian_eig(&m.hermitian_part())?;
        Ok((eig.min(), eig.eigenvectors.column(0)))
    };

    let hi = 2.0 * norm_sq;
    let step = hi / (PARANORMAL_GRID - 1) as f64;
    let mut best_k = 0;
    let mut best = eval(0.0)?;
    for k in 1..PARANORMAL_GRID {
        let r = eval(step * k as f64)?;
        if r.0 < best.0 {
            best = r;
            best_k = k;
        }
    }
    let mut best_lambda = step * best_k as f64;
    if hi > 0.0 {
        // golden-section refinement on the neighbouring grid cells
        let mut a = step * best_k.saturating_sub(1) as f64;
        let mut b = (step * (best_k + 1) as f64).min(hi);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let mut fc = eval(c)?;
        let mut fd = eval(d)?;
        for _ in 0..REFINE_ITERS {
            if fc.0 < fd.0 {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = eval(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = eval(d)?;
            }
        }
        for (lam, r) in [(c, fc), (d, fd)] {
            if r.0 < best.0 {
                best = r;
                best_lambda = lam;
            }
        }
    }
    let lambda_vec = best.1.phase_normalized();
    let lambda_margin = Margin::new(best.0, tol * scale.powi(4))
        .with_witness(Witness::ParameterVector { value: best_lambda, x: lambda_vec.clone() });

    let vtol = tol * scale * scale;
    let mut vector_margin = Margin::new(f64::INFINITY, vtol);
    let consider = |x: QVector, m: &mut Margin| {
        let v = paranormal_gap(t, &x);
        if v < m.value {
            m.value = v;
            m.witness = Some(Witness::Vector { x });
        }
    };
    for i in 0..n {
        consider(QVector::basis(n, i), &mut vector_margin);
    }
    if let Some(x) = lambda_vec.normalized() {
        consider(x.phase_normalized(), &mut vector_margin);
    }
    let mut rng = QRng::new(seed);
    for _ in 0..samples {
        consider(rng.unit_vector(n).phase_normalized(), &mut vector_margin);
    }
    if vector_margin.value >= -vtol {
        vector_margin.witness = None;
    }
    Ok(ParanormalReport { lambda_margin, vector_margin, samples, seed })
}

/// Vector-route paranormality margin with the default budget of 10³ random
/// unit vectors and seed 0. See [`paranormal_report`].
pub fn is_paranormal(t: &QMatrix, tol: f64) -> Result<Margin> {
    Ok(paranormal_report(t, tol, DEFAULT_PARANORMAL_SAMPLES, 0)?.vector_margin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::{ginibre, positive, random_normal, random_unitary};
    use crate::quaternion::Quaternion;

    fn jordan() -> QMatrix {
        QMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    #[test]
    fn classify_examples() {
        let c = classify_basic(&QMatrix::identity(3), 1e-8).unwrap();
        assert!(c.selfadjoint.holds && c.positive.holds && c.normal.holds && c.unitary.holds);
        let c = classify_basic(&jordan(), 1e-8).unwrap();
        assert!(!c.selfadjoint.holds && !c.positive.holds && !c.normal.holds && !c.unitary.holds);
        let c = classify_basic(&QMatrix::diag(&[Quaternion::I]), 1e-8).unwrap();
        assert!(c.normal.holds && c.unitary.holds && !c.selfadjoint.holds);
    }

    #[test]
    fn jordan_block_hyponormal_margin() {
        let m = is_p_hyponormal(&jordan(), 1.0, 1e-8).unwrap();
        assert!((m.value + 1.0).abs() < 1e-12);
        assert!(m.violated());
        match m.witness {
            Some(Witness::Vector { x }) => assert!(x.max_abs_diff(&QVector::basis(2, 0)) < 1e-12),
            _ => panic!("missing witness"),
        }
        assert!(is_p_hyponormal(&jordan(), 0.0, 1e-8).is_err());
        assert!(is_p_hyponormal(&jordan(), 1.5, 1e-8).is_err());
    }

    #[test]
    fn normal_and_unitary_are_p_hyponormal() {
        let mut rng = QRng::new(4);
        for _ in 0..10 {
            let t = random_normal(&mut rng, 4);
            let u = random_unitary(&mut rng, 4);
            for p in [0.25, 0.5, 1.0] {
                assert!(is_p_hyponormal(&t, p, 1e-8).unwrap().holds());
                assert!(is_p_hyponormal(&u, p, 1e-8).unwrap().value.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn jordan_block_not_paranormal() {
        let r = paranormal_report(&jordan(), 1e-8, 1000, 0).unwrap();
        assert!(r.lambda_margin.violated());
        assert!((r.vector_margin.value + 1.0).abs() < 1e-12);
        match &r.vector_margin.witness {
            Some(Witness::Vector { x }) => assert_eq!(x, &QVector::basis(2, 1)),
            _ => panic!("missing witness"),
        }
    }

    #[test]
    fn positive_operators_are_paranormal() {
        let mut rng = QRng::new(8);
        for _ in 0..5 {
            let t = positive(&mut rng, 3);
            let r = paranormal_report(&t, 1e-8, 200, 1).unwrap();
            assert!(r.lambda_margin.holds(), "{:?}", r.lambda_margin);
            assert!(r.vector_margin.holds());
            assert!(r.vector_margin.witness.is_none());
        }
        assert!(is_paranormal(&QMatrix::identity(3), 1e-8).unwrap().holds());
    }

    #[test]
    fn collapse_trace_identity() {
        let mut rng = QRng::new(2);
        for _ in 0..10 {
            let t = ginibre(&mut rng, 4);
            let scale = scale_of(&t);
            for p in [0.25, 0.5, 1.0] {
                let c = collapse_check(&t, p, 1e-8).unwrap();
                assert!(c.trace_residual <= 1e-8 * scale);
                assert!(c.normality_residual > 1e-4 * scale);
                assert!(c.margin.value < 0.0);
            }
        }
    }
}
