//! The generalized Cauchy–Schwarz inequality
//! `|⟨Tx, y⟩| ≤ (‖Tx‖‖y‖)^α (‖Ty‖‖x‖)^β`, `α + β = 1`, and the statements
//! built on it.

use serde::Serialize;

use crate::decomp::polar;
use crate::error::{QopError, Result};
use crate::harness::rng::QRng;
use crate::linalg::{operator_norm, QMatrix, QVector};
use crate::oracles::classes::{is_p_hyponormal, is_paranormal};
use crate::oracles::{scale_of, Margin, Witness};
use crate::quaternion::Quaternion;
use crate::spectral::{hermitian_eig, pow0};

/// β values swept when deciding membership.
pub const BETA_GRID: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
/// Pair evaluations per β unless overridden.
pub const DEFAULT_GCSI_BUDGET: usize = 1000;

const OVERLAP_TOL: f64 = 1e-8;

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(QopError::InvalidParameter(format!("beta must lie in (0, 1], got {beta}")));
    }
    Ok(())
}

struct PairSearch<'a> {
    t: &'a QMatrix,
    alpha: f64,
    beta: f64,
    budget: usize,
    used: usize,
    best: f64,
    best_pair: Option<(QVector, QVector)>,
}

impl PairSearch<'_> {
    /// `RHS − LHS` at unit vectors `x`, `y`.
    fn value(&self, x: &QVector, y: &QVector) -> f64 {
        let tx = self.t * x;
        let ty = self.t * y;
        let lhs = tx.inner_unchecked(y).norm();
        let rhs = pow0(tx.norm(), self.alpha) * pow0(ty.norm(), self.beta);
        rhs - lhs
    }

    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    /// Evaluates the pair if budget remains; returns the value.
    fn offer(&mut self, x: QVector, y: QVector) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        self.used += 1;
        let v = self.value(&x, &y);
        if v < self.best {
            self.best = v;
            self.best_pair = Some((x, y));
        }
        Some(v)
    }
}

/// Smallest `RHS − |⟨Tx, y⟩|` found over unit pairs `(x, y)` within `budget`
/// evaluations: standard basis pairs first, then pairs of singular vectors,
/// then seeded random pairs, and finally a local descent from the best pair.
/// A value below `−tol·max(1, ‖T‖)` certifies `T ∉ GCSI` for this β; the
/// witness pair is phase-normalised.
pub fn gcsi_margin(t: &QMatrix, beta: f64, budget: usize, seed: u64, tol: f64) -> Result<Margin> {
    let n = t.require_square()?;
    check_beta(beta)?;
    let mut s = PairSearch { t, alpha: 1.0 - beta, beta, budget, used: 0, best: f64::INFINITY, best_pair: None };

    'basis: for i in 0..n {
        for j in 0..n {
            if s.offer(QVector::basis(n, i), QVector::basis(n, j)).is_none() {
                break 'basis;
            }
        }
    }

    let right = hermitian_eig(&(&t.adjoint() * t).hermitian_part())?.eigenvectors.columns();
    let left = hermitian_eig(&(t * &t.adjoint()).hermitian_part())?.eigenvectors.columns();
    let singular: Vec<QVector> = right.into_iter().chain(left).collect();
    'singular: for x in &singular {
        for y in &singular {
            if s.offer(x.clone(), y.clone()).is_none() {
                break 'singular;
            }
        }
    }

    let mut rng = QRng::new(seed);
    let descent = s.budget.saturating_sub(s.used) / 4;
    while s.budget - s.used > descent {
        let x = rng.unit_vector(n);
        let y = rng.unit_vector(n);
        s.offer(x, y);
    }

    if let Some((mut x, mut y)) = s.best_pair.clone() {
        let mut current = s.best;
        let mut step = 0.1;
        while !s.exhausted() && step > 1e-9 {
            let px = (&x + &rng.gaussian_vector(n).scale(step)).normalized();
            let py = (&y + &rng.gaussian_vector(n).scale(step)).normalized();
            let (Some(px), Some(py)) = (px, py) else { continue };
            match s.offer(px.clone(), py.clone()) {
                Some(v) if v < current => {
                    current = v;
                    x = px;
                    y = py;
                }
                Some(_) => step *= 0.8,
                None => break,
            }
        }
    }

    let tolerance = tol * scale_of(t);
    let mut margin = Margin::new(s.best, tolerance);
    if let Some((x, y)) = s.best_pair {
        margin = margin.with_witness(Witness::Pair { x: x.phase_normalized(), y: y.phase_normalized() });
    }
    Ok(margin)
}

#[derive(Clone, Debug, Serialize)]
pub struct GcsiSweep {
    pub per_beta: Vec<(f64, Margin)>,
    pub budget: usize,
    pub seed: u64,
}

impl GcsiSweep {
    /// Some β passed every sampled pair.
    pub fn member_evidence(&self) -> bool {
        self.per_beta.iter().any(|(_, m)| m.holds())
    }

    /// Every β has a violating pair.
    pub fn certified_nonmember(&self) -> bool {
        self.per_beta.iter().all(|(_, m)| m.violated())
    }

    /// The β with the largest margin.
    pub fn best(&self) -> Option<&(f64, Margin)> {
        self.per_beta.iter().max_by(|a, b| a.1.value.total_cmp(&b.1.value))
    }
}

/// Membership test over [`BETA_GRID`]: `T ∈ GCSI` needs some β to work.
pub fn gcsi_sweep(t: &QMatrix, budget: usize, seed: u64, tol: f64) -> Result<GcsiSweep> {
    let per_beta = BETA_GRID
        .iter()
        .map(|&b| Ok((b, gcsi_margin(t, b, budget, seed, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GcsiSweep { per_beta, budget, seed })
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClosureOp {
    /// `rT` for real `r`.
    Scalar(f64),
    /// `qT` for a non-real quaternion: exploratory only, no claim attached.
    QuaternionScalar(Quaternion),
    Inverse,
    /// `W*TW` for unitary `W`.
    UnitaryEquiv(QMatrix),
    /// `TP` for an orthogonal projector `P` onto a `T`-invariant subspace.
    Compression(QMatrix),
}

impl ClosureOp {
    pub fn name(&self) -> &'static str {
        match self {
            ClosureOp::Scalar(_) => "scalar",
            ClosureOp::QuaternionScalar(_) => "quaternion-scalar",
            ClosureOp::Inverse => "inverse",
            ClosureOp::UnitaryEquiv(_) => "unitary-equiv",
            ClosureOp::Compression(_) => "compression",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub op: &'static str,
    pub beta: f64,
    pub original: Margin,
    pub transformed: Margin,
}

/// `T⁻¹ = |T|⁻¹U*` from the polar decomposition.
fn inverse(t: &QMatrix) -> Result<QMatrix> {
    let parts = polar(t)?;
    if parts.rank < parts.n() {
        return Err(QopError::Precondition("inverse requested for a singular operator".into()));
    }
    Ok(&parts.abs_power_unchecked(-1.0) * &parts.u.adjoint())
}

fn apply_closure(t: &QMatrix, op: &ClosureOp, tol: f64) -> Result<QMatrix> {
    let n = t.rows();
    match op {
        ClosureOp::Scalar(r) => {
            if !r.is_finite() {
                return Err(QopError::InvalidParameter(format!("scalar must be finite, got {r}")));
            }
            Ok(t.scale(*r))
        }
        ClosureOp::QuaternionScalar(q) => Ok(t.mul_left(*q)),
        ClosureOp::Inverse => inverse(t),
        ClosureOp::UnitaryEquiv(w) => {
            if w.rows() != n || w.cols() != n {
                return Err(QopError::DimensionMismatch(format!("unitary is {}x{}, operator is {n}x{n}", w.rows(), w.cols())));
            }
            let defect = (&w.adjoint() * w).max_abs_diff(&QMatrix::identity(n));
            if defect > 1e-8 {
                return Err(QopError::Precondition(format!("W is not unitary (defect {defect:e})")));
            }
            Ok(&(&w.adjoint() * t) * w)
        }
        ClosureOp::Compression(p) => {
            if p.rows() != n || p.cols() != n {
                return Err(QopError::DimensionMismatch(format!("projector is {}x{}, operator is {n}x{n}", p.rows(), p.cols())));
            }
            let defect = p.selfadjoint_residual().max((&(p * p) - p).max_abs());
            if defect > 1e-8 {
                return Err(QopError::Precondition(format!("P is not an orthogonal projector (defect {defect:e})")));
            }
            let tp = t * p;
            let leak = operator_norm(&(&tp - &(p * &tp)));
            if leak > tol * scale_of(t) {
                return Err(QopError::Precondition(format!("range of P is not invariant: ‖(I−P)TP‖ = {leak:e}")));
            }
            Ok(tp)
        }
    }
}

/// Re-tests the transformed operator with the same β, budget and seed.
/// Requires the original margin to hold.
pub fn check_gcsi_closure(
    t: &QMatrix,
    op: &ClosureOp,
    beta: f64,
    budget: usize,
    seed: u64,
    tol: f64,
) -> Result<ClosureReport> {
    let original = gcsi_margin(t, beta, budget, seed, tol)?;
    if original.violated() {
        return Err(QopError::Precondition(format!(
            "operator fails GCSI at beta = {beta} (margin {:e})",
            original.value
        )));
    }
    let s = apply_closure(t, op, tol)?;
    let transformed = gcsi_margin(&s, beta, budget, seed, tol)?;
    Ok(ClosureReport { op: op.name(), beta, original, transformed })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub kernel_dim: usize,
    pub kernel_sq_dim: usize,
    /// `max ‖T*k‖ / max(1, ‖T‖)` over an orthonormal basis of `ker T`.
    pub star_leak: f64,
    /// Largest cosine between `ker T` and `ran T`; 1 means they intersect.
    pub overlap: f64,
    /// `ker T ⊂ ker T*` within tolerance.
    pub contained: bool,
    /// `ker T = ker T²`.
    pub equal: bool,
}

impl KernelReport {
    pub fn holds(&self) -> bool {
        self.contained && self.equal
    }
}

/// Tests `ker T ⊂ ker T*` and `ker T = ker T²`. The second uses
/// `dim ker T² = dim ker T + dim(ker T ∩ ran T)`, reading the intersection
/// off the singular values of `R*K` for orthonormal bases `K` of `ker T`
/// and `R` of `ran T`.
pub fn check_kernel_reduction(t: &QMatrix, tol: f64) -> Result<KernelReport> {
    let parts = polar(t)?;
    let scale = scale_of(t);
    let kernel = parts.kernel_basis();
    let kernel_dim = kernel.len();
    let ts = t.adjoint();
    let star_leak = kernel.iter().map(|k| (&ts * k).norm()).fold(0.0, f64::max) / scale;

    let range: Vec<QVector> = parts.range_basis().iter().map(|v| &parts.u * v).collect();
    let (overlap, shared) = if kernel.is_empty() || range.is_empty() {
        (0.0, 0)
    } else {
        let k = QMatrix::from_columns(&kernel)?;
        let r = QMatrix::from_columns(&range)?;
        let m = &r.adjoint() * &k;
        let eig = hermitian_eig(&(&m.adjoint() * &m).hermitian_part())?;
        let cosines: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
        let overlap = cosines.iter().copied().fold(0.0, f64::max);
        (overlap, cosines.iter().filter(|&&c| c >= 1.0 - OVERLAP_TOL).count())
    };
    Ok(KernelReport {
        kernel_dim,
        kernel_sq_dim: kernel_dim + shared,
        star_leak,
        overlap,
        contained: star_leak <= tol,
        equal: shared == 0,
    })
}

/// `‖T²U*x‖‖U*x‖ − ‖TU*x‖²` with `U` the polar factor.
pub fn check_tu_star(t: &QMatrix, x: &QVector, tol: f64) -> Result<Margin> {
    let parts = polar(t)?;
    if x.len() != parts.n() {
        return Err(QopError::DimensionMismatch(format!("vector has length {}, operator is {}x{}", x.len(), parts.n(), parts.n())));
    }
    let y = &parts.u.adjoint() * x;
    let ty = t * &y;
    let tty = t * &ty;
    let value = tty.norm() * y.norm() - ty.norm_sqr();
    let scale = scale_of(t);
    let mut m = Margin::new(value, tol * scale * scale * x.norm_sqr().max(1.0));
    if m.violated() {
        m = m.with_witness(Witness::Vector { x: x.clone() });
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct ImpliesReport {
    pub p: f64,
    pub p_hyponormal: Margin,
    /// GCSI margin at `β = p`.
    pub gcsi: Margin,
    pub gcsi_sweep: GcsiSweep,
    pub paranormal: Margin,
    /// Broken implications; empty when consistent.
    pub flags: Vec<String>,
}

impl ImpliesReport {
    pub fn consistent(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Cross-checks p-hyponormal ⇒ GCSI (at `β = p`) ⇒ paranormal on one
/// operator. A p-hyponormal operator with a certified GCSI violation, or an
/// operator with GCSI evidence and a certified paranormality violation, is
/// flagged.
pub fn check_gcsi_implies(t: &QMatrix, p: f64, budget: usize, seed: u64, tol: f64) -> Result<ImpliesReport> {
    let p_hyponormal = is_p_hyponormal(t, p, tol)?;
    let gcsi = gcsi_margin(t, p, budget, seed, tol)?;
    let gcsi_sweep = gcsi_sweep(t, budget, seed, tol)?;
    let paranormal = is_paranormal(t, tol)?;
    let mut flags = Vec::new();
    if p_hyponormal.holds() && gcsi.violated() {
        flags.push(format!("{p}-hyponormal operator violates GCSI at beta = {p}"));
    }
    if gcsi_sweep.member_evidence() && paranormal.violated() {
        flags.push("operator with GCSI evidence violates paranormality".into());
    }
    Ok(ImpliesReport { p, p_hyponormal, gcsi, gcsi_sweep, paranormal, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::{random_normal, random_unitary};

    fn jordan() -> QMatrix {
        QMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
    }

    fn pair_witness(m: &Margin) -> (QVector, QVector) {
        match &m.witness {
            Some(Witness::Pair { x, y }) => (x.clone(), y.clone()),
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn jordan_block_exact_witness() {
        for beta in BETA_GRID {
            let m = gcsi_margin(&jordan(), beta, 1000, 0, 1e-8).unwrap();
            assert_eq!(m.value, -1.0);
            let (x, y) = pair_witness(&m);
            assert_eq!(x, QVector::basis(2, 1));
            assert_eq!(y, QVector::basis(2, 0));
        }
        let s = gcsi_sweep(&jordan(), 1000, 0, 1e-8).unwrap();
        assert!(s.certified_nonmember());
    }

    #[test]
    fn identity_and_unitaries_pass() {
        for beta in [0.1, 0.5, 1.0] {
            assert!(gcsi_margin(&QMatrix::identity(3), beta, 500, 1, 1e-8).unwrap().value >= -1e-12);
        }
        let mut rng = QRng::new(3);
        for _ in 0..5 {
            let u = random_unitary(&mut rng, 3);
            assert!(gcsi_margin(&u, 0.5, 500, 2, 1e-8).unwrap().value >= -1e-10);
        }
    }

    #[test]
    fn beta_validated() {
        assert!(gcsi_margin(&jordan(), 0.0, 10, 0, 1e-8).is_err());
        assert!(gcsi_margin(&jordan(), 1.2, 10, 0, 1e-8).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = QRng::new(5);
        let t = crate::harness::gen::ginibre(&mut rng, 3);
        assert_eq!(gcsi_margin(&t, 0.3, 400, 9, 1e-8).unwrap(), gcsi_margin(&t, 0.3, 400, 9, 1e-8).unwrap());
    }

    #[test]
    fn closure_trivial_cases() {
        let t = QMatrix::identity(2);
        for op in [ClosureOp::Scalar(1.0), ClosureOp::UnitaryEquiv(QMatrix::identity(2)), ClosureOp::Inverse] {
            let r = check_gcsi_closure(&t, &op, 0.5, 300, 4, 1e-8).unwrap();
            assert_eq!(r.original, r.transformed);
        }
        assert!(check_gcsi_closure(&jordan(), &ClosureOp::Scalar(2.0), 0.5, 300, 4, 1e-8).is_err());
        let singular = QMatrix::real_diag(&[1.0, 0.0]);
        assert!(matches!(
            check_gcsi_closure(&singular, &ClosureOp::Inverse, 0.5, 300, 4, 1e-8),
            Err(QopError::Precondition(_))
        ));
        let p = QMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let d = QMatrix::real_diag(&[1.0, 2.0]);
        assert!(matches!(
            check_gcsi_closure(&d, &ClosureOp::Compression(p), 0.5, 300, 4, 1e-8),
            Err(QopError::Precondition(_))
        ));
        let p = QMatrix::real_diag(&[1.0, 0.0]);
        let r = check_gcsi_closure(&d, &ClosureOp::Compression(p), 0.5, 300, 4, 1e-8).unwrap();
        assert!(r.transformed.holds());
    }

    #[test]
    fn kernel_examples() {
        let r = check_kernel_reduction(&QMatrix::identity(2), 1e-8).unwrap();
        assert!(r.holds() && r.kernel_dim == 0);
        let r = check_kernel_reduction(&jordan(), 1e-8).unwrap();
        assert!(!r.contained && !r.equal);
        assert_eq!((r.kernel_dim, r.kernel_sq_dim), (1, 2));
        let d = QMatrix::diag(&[Quaternion::ZERO, Quaternion::J * 3.0]);
        let r = check_kernel_reduction(&d, 1e-8).unwrap();
        assert!(r.holds());
        assert_eq!((r.kernel_dim, r.kernel_sq_dim), (1, 1));
    }

    #[test]
    fn tu_star_examples() {
        let mut rng = QRng::new(6);
        let u = random_unitary(&mut rng, 4);
        let x = rng.gaussian_vector(4);
        assert!(check_tu_star(&u, &x, 1e-8).unwrap().value.abs() < 1e-10);
        assert!(check_tu_star(&QMatrix::identity(4), &x, 1e-8).unwrap().value.abs() < 1e-10);
        // x ∈ ker U* = ker T*
        let k = QVector::basis(2, 1);
        assert_eq!(check_tu_star(&jordan(), &k, 1e-8).unwrap().value, 0.0);
    }

    #[test]
    fn implies_examples() {
        let r = check_gcsi_implies(&jordan(), 0.5, 500, 0, 1e-8).unwrap();
        assert!(r.p_hyponormal.violated() && r.gcsi.violated() && r.paranormal.violated());
        assert!(r.consistent());
        match &r.paranormal.witness {
            Some(Witness::Vector { x }) => assert_eq!(x, &QVector::basis(2, 1)),
            _ => panic!(),
        }
        let mut rng = QRng::new(7);
        let t = random_normal(&mut rng, 3);
        let r = check_gcsi_implies(&t, 0.5, 500, 0, 1e-8).unwrap();
        assert!(r.p_hyponormal.holds() && r.gcsi.holds() && r.paranormal.holds());
        assert!(r.consistent());
    }
}
