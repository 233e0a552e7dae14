//! Margins for the operator inequalities: Hölder–McCarthy, Löwner–Heinz,
//! Furuta, the polar chain, the Aluthge theorems and eigenspace reduction.

use serde::Serialize;

use crate::decomp::{aluthge_with, polar, unitary_completion};
use crate::error::{QopError, Result};
use crate::linalg::{operator_norm, QMatrix};
use crate::oracles::classes::is_p_hyponormal;
use crate::oracles::{scale_of, Margin, Witness};
use crate::quaternion::Quaternion;
use crate::spectral::{hermitian_eig, power_from_eig, power_psd, HermitianEigensystem};

/// Relative threshold on eigenvalues of `Δ_q(U)*Δ_q(U)` treated as kernel.
const EIGENSPACE_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-8;

/// Smallest eigenvalue of a computed difference, with its eigenvector.
fn order_margin(diff: &QMatrix, tolerance: f64) -> Result<Margin> {
    let eig = hermitian_eig(&diff.hermitian_part())?;
    let x = eig.eigenvectors.column(0).phase_normalized();
    Ok(Margin::new(eig.min(), tolerance).with_witness(Witness::Vector { x }))
}

/// Eigensystem of a positive operator, rejecting materially negative input.
fn positive_eig(t: &QMatrix, tol: f64, what: &str) -> Result<HermitianEigensystem> {
    let eig = hermitian_eig(t)?;
    if eig.min() < -tol * eig.spectral_norm().max(1.0) {
        return Err(QopError::Precondition(format!("{what} is not positive (smallest eigenvalue {:e})", eig.min())));
    }
    Ok(eig)
}

fn check_order(s: &QMatrix, t: &QMatrix, tol: f64) -> Result<()> {
    if s.rows() != t.rows() || s.cols() != t.cols() {
        return Err(QopError::DimensionMismatch(format!("{}x{} vs {}x{}", s.rows(), s.cols(), t.rows(), t.cols())));
    }
    let gap = hermitian_eig(&(s - t).hermitian_part())?.min();
    if gap < -tol * scale_of(s) {
        return Err(QopError::Precondition(format!("order S ⪰ T violated (smallest eigenvalue of S − T is {gap:e})")));
    }
    Ok(())
}

fn finite_param(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(QopError::InvalidParameter(format!("{name} must be finite, got {v}")));
    }
    Ok(())
}

/// `⟨T^r x, x⟩ − ⟨Tx, x⟩^r ‖x‖^{2(1−r)}` for `r > 1`, negated for `0 < r < 1`.
/// Tolerance `tol·max(1, ‖T‖)^r·‖x‖²`.
pub fn check_holder_mccarthy(t: &QMatrix, x: &crate::linalg::QVector, r: f64, tol: f64) -> Result<Margin> {
    finite_param("r", r)?;
    if r <= 0.0 || r == 1.0 {
        return Err(QopError::InvalidParameter(format!("r must be positive and different from 1, got {r}")));
    }
    if x.len() != t.rows() {
        return Err(QopError::DimensionMismatch(format!("vector has length {}, operator has {} rows", x.len(), t.rows())));
    }
    let nx2 = x.norm_sqr();
    if nx2 == 0.0 {
        return Err(QopError::InvalidParameter("x must be nonzero".into()));
    }
    let eig = positive_eig(t, tol, "T")?;
    let tr = power_from_eig(&eig, r)?;
    let lhs = x.inner_unchecked(&(&tr * x)).w;
    let a = x.inner_unchecked(&(t * x)).w.max(0.0);
    let rhs = a.powf(r) * nx2.powf(1.0 - r);
    let value = if r > 1.0 { lhs - rhs } else { rhs - lhs };
    let tolerance = tol * eig.spectral_norm().max(1.0).powf(r) * nx2;
    Ok(Margin::new(value, tolerance))
}

fn lowner_heinz_impl(s: &QMatrix, t: &QMatrix, r: f64, tol: f64) -> Result<Margin> {
    finite_param("r", r)?;
    if r < 0.0 {
        return Err(QopError::InvalidParameter(format!("r must be nonnegative, got {r}")));
    }
    check_order(s, t, tol)?;
    let es = positive_eig(s, tol, "S")?;
    let et = positive_eig(t, tol, "T")?;
    let diff = &power_from_eig(&es, r)? - &power_from_eig(&et, r)?;
    order_margin(&diff, tol * es.spectral_norm().max(1.0).powf(r))
}

/// `λ_min(S^r − T^r)` for `S ⪰ T ⪰ 0` and `r ∈ [0, 1]`.
pub fn check_lowner_heinz(s: &QMatrix, t: &QMatrix, r: f64, tol: f64) -> Result<Margin> {
    if !(0.0..=1.0).contains(&r) {
        return Err(QopError::InvalidParameter(format!("r must lie in [0, 1], got {r}")));
    }
    lowner_heinz_impl(s, t, r, tol)
}

/// Same margin for any `r ≥ 0`; outside `[0, 1]` nothing is asserted.
pub fn lowner_heinz_probe(s: &QMatrix, t: &QMatrix, r: f64, tol: f64) -> Result<Margin> {
    lowner_heinz_impl(s, t, r, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FurutaMode {
    /// Enforce `(1 + 2r)q ≥ p + 2r`.
    Strict,
    /// Allow exponents violating the constraint; margins are exploratory.
    Probe,
}

/// `(1 + 2r)q ≥ p + 2r`.
pub fn furuta_admissible(p: f64, q: f64, r: f64) -> bool {
    (1.0 + 2.0 * r) * q >= (p + 2.0 * r) * (1.0 - 1e-12)
}

/// Margins of `(B^r A^p B^r)^{1/q} ⪰ B^{(p+2r)/q}` and
/// `A^{(p+2r)/q} ⪰ (A^r B^p A^r)^{1/q}` for `A ⪰ B ⪰ 0`.
/// Tolerance `tol·max(1, ‖A‖)^{(p+2r)/q}`.
pub fn check_furuta(
    a: &QMatrix,
    b: &QMatrix,
    p: f64,
    q: f64,
    r: f64,
    tol: f64,
    mode: FurutaMode,
) -> Result<(Margin, Margin)> {
    for (name, v) in [("p", p), ("q", q), ("r", r)] {
        finite_param(name, v)?;
    }
    if p < 0.0 || q < 1.0 || r < 0.0 {
        return Err(QopError::InvalidParameter(format!("need p ≥ 0, q ≥ 1, r ≥ 0; got p = {p}, q = {q}, r = {r}")));
    }
    if mode == FurutaMode::Strict && !furuta_admissible(p, q, r) {
        return Err(QopError::InvalidParameter(format!("(1 + 2r)q ≥ p + 2r fails for p = {p}, q = {q}, r = {r}")));
    }
    check_order(a, b, tol)?;
    let ea = positive_eig(a, tol, "A")?;
    let eb = positive_eig(b, tol, "B")?;
    let e = (p + 2.0 * r) / q;

    let br = power_from_eig(&eb, r)?;
    let inner1 = (&(&br * &power_from_eig(&ea, p)?) * &br).hermitian_part();
    let first = &power_psd(&inner1, 1.0 / q)? - &power_from_eig(&eb, e)?;

    let ar = power_from_eig(&ea, r)?;
    let inner2 = (&(&ar * &power_from_eig(&eb, p)?) * &ar).hermitian_part();
    let second = &power_from_eig(&ea, e)? - &power_psd(&inner2, 1.0 / q)?;

    let tolerance = tol * ea.spectral_norm().max(1.0).powf(e);
    Ok((order_margin(&first, tolerance)?, order_margin(&second, tolerance)?))
}

/// Margins of `U*|T|U − |T|` and `|T| − U|T|U*` for semi-hyponormal `T`.
/// With `probe` set the semi-hyponormality precondition is skipped.
pub fn check_chain_semihypo(t: &QMatrix, tol: f64, probe: bool) -> Result<(Margin, Margin)> {
    if !probe {
        let pre = is_p_hyponormal(t, 0.5, tol)?;
        if pre.violated() {
            return Err(QopError::Precondition(format!("operator is not semi-hyponormal (margin {:e})", pre.value)));
        }
    }
    let parts = polar(t)?;
    let abs_t = &parts.abs_t;
    let u = &parts.u;
    let us = u.adjoint();
    let tolerance = tol * scale_of(t);
    let upper = &(&(&us * abs_t) * u) - abs_t;
    let lower = abs_t - &(&(u * abs_t) * &us);
    Ok((order_margin(&upper, tolerance)?, order_margin(&lower, tolerance)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReading {
    /// `"aluthge-hypothesis"` (p ∈ [1/2, 1]) or `"gain-hypothesis"` (p ∈ (0, 1/2)).
    pub reading: &'static str,
    /// Whether `p` satisfies this reading's hypothesis.
    pub applies: bool,
    /// Hyponormality margin of `|T̃|^{1/2}Ũ|T̃|^{1/2}`.
    pub margin: Margin,
}

#[derive(Clone, Debug, Serialize)]
pub struct AluthgeReport {
    pub p: f64,
    /// p-hyponormal margin of `T` itself.
    pub precondition: Margin,
    /// Class exponent asserted for `T̃`: 1 for `p ≥ 1/2`, `p + 1/2` below.
    pub gained_exponent: f64,
    pub main: Margin,
    /// `(q, q-hyponormal margin of T)` for grid values `q ≤ p`.
    pub monotone: Vec<(f64, Margin)>,
    pub corollary: Vec<CorollaryReading>,
}

impl AluthgeReport {
    /// Smallest margin among the assertions that apply, relative to `tol`.
    pub fn min_relative(&self, tol: f64) -> f64 {
        let mut m = self.main.relative(tol);
        for (_, q) in &self.monotone {
            m = m.min(q.relative(tol));
        }
        for c in self.corollary.iter().filter(|c| c.applies) {
            m = m.min(c.margin.relative(tol));
        }
        m
    }
}

/// Aluthge-transform theorems for a p-hyponormal `T`, `p ∈ (0, 1]`:
/// `T̃` is hyponormal when `p ≥ 1/2` and `(p + 1/2)`-hyponormal otherwise;
/// `T` is q-hyponormal for every `q ≤ p`; and the second transform
/// `|T̃|^{1/2}Ũ|T̃|^{1/2}` is hyponormal. The last statement is reported
/// under both candidate hypotheses. With `probe` set the precondition is
/// measured but not enforced.
pub fn check_aluthge_theorems(t: &QMatrix, p: f64, tol: f64, probe: bool) -> Result<AluthgeReport> {
    let precondition = is_p_hyponormal(t, p, tol)?;
    if !probe && precondition.violated() {
        return Err(QopError::Precondition(format!("operator is not {p}-hyponormal (margin {:e})", precondition.value)));
    }
    let parts = polar(t)?;
    let at = aluthge_with(&parts);
    let gained_exponent = if p >= 0.5 { 1.0 } else { p + 0.5 };
    let main = is_p_hyponormal(&at, gained_exponent, tol)?;

    let mut grid: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).filter(|&q| q <= p + 1e-12).collect();
    if grid.last().is_none_or(|&q| (q - p).abs() > 1e-12) {
        grid.push(p);
    }
    let monotone =
        grid.into_iter().map(|q| Ok((q, is_p_hyponormal(t, q, tol)?))).collect::<Result<Vec<_>>>()?;

    let second = aluthge_with(&polar(&at)?);
    let hypo = is_p_hyponormal(&second, 1.0, tol)?;
    let corollary = vec![
        CorollaryReading { reading: "aluthge-hypothesis", applies: p >= 0.5, margin: hypo.clone() },
        CorollaryReading { reading: "gain-hypothesis", applies: p < 0.5, margin: hypo },
    ];
    Ok(AluthgeReport { p, precondition, gained_exponent, main, monotone, corollary })
}

/// Reducing-subspace margin `−max(‖(I−P)TP‖, ‖(I−P)T*P‖)` for `P` the
/// projector onto `ker Δ_q(U)`, `U` the (completed) unitary polar factor.
pub fn check_eigenspace_reducing(t: &QMatrix, q: Quaternion, tol: f64) -> Result<Margin> {
    let n = t.require_square()?;
    if (q.norm() - 1.0).abs() > UNITARY_TOL {
        return Err(QopError::InvalidParameter(format!("|q| must be 1, got {}", q.norm())));
    }
    let parts = polar(t)?;
    let u = if parts.rank == n { parts.u.clone() } else { unitary_completion(&parts)? };
    let defect = (&u.adjoint() * &u).max_abs_diff(&QMatrix::identity(n));
    if defect > UNITARY_TOL {
        return Err(QopError::Precondition(format!("polar factor is not unitary (defect {defect:e})")));
    }
    let d = u.delta(q)?;
    let eig = hermitian_eig(&(&d.adjoint() * &d).hermitian_part())?;
    let cut = EIGENSPACE_TOL * eig.spectral_norm().max(1.0);
    let kernel = eig.vectors_where(|l| l <= cut);
    if kernel.is_empty() {
        return Err(QopError::Domain(format!("{q} is not a right eigenvalue of the polar factor")));
    }
    let k = QMatrix::from_columns(&kernel)?;
    let proj = &k * &k.adjoint();
    let complement = &QMatrix::identity(n) - &proj;
    let leak_t = operator_norm(&(&(&complement * t) * &proj));
    let leak_ts = operator_norm(&(&(&complement * &t.adjoint()) * &proj));
    Ok(Margin::new(-leak_t.max(leak_ts), tol * scale_of(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen::{near_normal, normal_with_spectrum, ordered_pair, positive, random_normal, random_unitary};
    use crate::harness::rng::QRng;
    use crate::linalg::QVector;

    fn lh_pair() -> (QMatrix, QMatrix) {
        (
            QMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]).unwrap(),
            QMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap(),
        )
    }

    #[test]
    fn holder_mccarthy_examples() {
        let t = QMatrix::real_diag(&[1.0, 4.0]);
        let x = QVector::from_real(&[1.0, 1.0]).scale(0.5f64.sqrt());
        let m = check_holder_mccarthy(&t, &x, 2.0, 1e-8).unwrap();
        assert!((m.value - 2.25).abs() < 1e-12);
        let m = check_holder_mccarthy(&t, &x, 0.5, 1e-8).unwrap();
        assert!((m.value - (2.5f64.sqrt() - 1.5)).abs() < 1e-12);
        let m = check_holder_mccarthy(&QMatrix::identity(2), &x, 3.0, 1e-8).unwrap();
        assert!(m.value.abs() < 1e-12);
        assert!(check_holder_mccarthy(&t, &x, 1.0, 1e-8).is_err());
        assert!(check_holder_mccarthy(&t, &QVector::zeros(2), 2.0, 1e-8).is_err());
    }

    #[test]
    fn lowner_heinz_examples() {
        let (a, b) = lh_pair();
        let m1 = check_lowner_heinz(&a, &b, 1.0, 1e-8).unwrap();
        let gap = hermitian_eig(&(&a - &b)).unwrap().min();
        assert!((m1.value - gap).abs() < 1e-12);
        assert!(check_lowner_heinz(&a, &b, 0.0, 1e-8).unwrap().value.abs() < 1e-12);
        assert!(check_lowner_heinz(&a, &b, 0.5, 1e-8).unwrap().holds());
        let probe = lowner_heinz_probe(&a, &b, 2.0, 1e-8).unwrap();
        assert!((probe.value - (3.0 - 10f64.sqrt())).abs() < 1e-12);
        assert!(check_lowner_heinz(&a, &b, 2.0, 1e-8).is_err());
        assert!(matches!(check_lowner_heinz(&b, &a, 0.5, 1e-8), Err(QopError::Precondition(_))));
    }

    #[test]
    fn furuta_examples() {
        let (a, b) = lh_pair();
        let (m1, m2) = check_furuta(&a, &b, 1.0, 1.0, 0.0, 1e-8, FurutaMode::Strict).unwrap();
        let gap = hermitian_eig(&(&a - &b)).unwrap().min();
        assert!((m1.value - gap).abs() < 1e-12 && (m2.value - gap).abs() < 1e-12);
        let (m1, m2) = check_furuta(&a, &b, 2.0, 2.0, 1.0, 1e-8, FurutaMode::Strict).unwrap();
        assert!(m1.holds() && m2.holds());
        let (m1, m2) = check_furuta(&a, &a, 2.0, 1.5, 0.5, 1e-8, FurutaMode::Strict).unwrap();
        assert!(m1.value.abs() < 1e-10 && m2.value.abs() < 1e-10);
        assert!(check_furuta(&a, &b, 3.0, 1.0, 0.0, 1e-8, FurutaMode::Strict).is_err());
        assert!(check_furuta(&a, &b, 3.0, 1.0, 0.0, 1e-8, FurutaMode::Probe).is_ok());
    }

    #[test]
    fn furuta_random_admissible() {
        let mut rng = QRng::new(11);
        for _ in 0..20 {
            let (a, b) = ordered_pair(&mut rng, 3);
            let p = rng.uniform_in(0.0, 3.0);
            let r = rng.uniform_in(0.0, 2.0);
            let q = rng.uniform_in(1.0, 3.0).max((p + 2.0 * r) / (1.0 + 2.0 * r));
            let (m1, m2) = check_furuta(&a, &b, p, q, r, 1e-8, FurutaMode::Strict).unwrap();
            assert!(m1.holds() && m2.holds(), "{p} {q} {r}: {} {}", m1.value, m2.value);
        }
    }

    #[test]
    fn chain_on_normal_and_unitary() {
        let mut rng = QRng::new(12);
        let t = random_normal(&mut rng, 4);
        let (m1, m2) = check_chain_semihypo(&t, 1e-8, false).unwrap();
        assert!(m1.value.abs() < 1e-9 && m2.value.abs() < 1e-9);
        let u = random_unitary(&mut rng, 4);
        let (m1, m2) = check_chain_semihypo(&u, 1e-8, false).unwrap();
        assert!(m1.value.abs() < 1e-12 && m2.value.abs() < 1e-12);
        let jordan = QMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(check_chain_semihypo(&jordan, 1e-8, false).is_err());
        assert!(check_chain_semihypo(&near_normal(&mut rng, 3, 1e-3), 1e-8, true).is_ok());
    }

    #[test]
    fn aluthge_theorems_on_normal() {
        let mut rng = QRng::new(13);
        let t = random_normal(&mut rng, 3);
        let r = check_aluthge_theorems(&t, 0.75, 1e-8, false).unwrap();
        assert!(r.main.holds() && r.min_relative(1e-8) >= -1e-8);
        let u = random_unitary(&mut rng, 3);
        let r = check_aluthge_theorems(&u, 0.25, 1e-8, false).unwrap();
        assert_eq!(r.gained_exponent, 0.75);
        assert!(r.main.value.abs() < 1e-10);
        let r = check_aluthge_theorems(&t, 0.5, 1e-8, false).unwrap();
        let qs: Vec<f64> = r.monotone.iter().map(|(q, _)| *q).collect();
        assert_eq!(qs, vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        assert!(r.corollary[0].applies && !r.corollary[1].applies);
        let jordan = QMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(check_aluthge_theorems(&jordan, 0.5, 1e-8, false).is_err());
    }

    #[test]
    fn eigenspace_reducing_examples() {
        let u = QMatrix::diag(&[Quaternion::I]);
        assert_eq!(check_eigenspace_reducing(&u, Quaternion::I, 1e-8).unwrap().value, 0.0);
        let t = QMatrix::diag(&[Quaternion::I, Quaternion::real(2.0)]);
        let m = check_eigenspace_reducing(&t, Quaternion::I, 1e-8).unwrap();
        assert!(m.value.abs() < 1e-12);
        // U = diag(i, j) and j ~ i, so ker Δ_i(U) is the whole space
        let t = QMatrix::diag(&[Quaternion::I, Quaternion::J * 2.0]);
        assert_eq!(t.delta(Quaternion::I).unwrap().max_abs(), 3.0);
        let u = polar(&t).unwrap().u;
        assert!(u.delta(Quaternion::I).unwrap().max_abs() < 1e-15);
        assert!(check_eigenspace_reducing(&t, Quaternion::I, 1e-8).unwrap().value.abs() < 1e-12);
        let mut rng = QRng::new(14);
        let t = normal_with_spectrum(&mut rng, &[Quaternion::I, Quaternion::J * 2.0, Quaternion::real(-1.5)]);
        let m = check_eigenspace_reducing(&t, Quaternion::I, 1e-8).unwrap();
        assert!(m.holds(), "{}", m.value);
        assert!(check_eigenspace_reducing(&t, Quaternion::real(1.0), 1e-8).is_err());
        assert!(check_eigenspace_reducing(&t, Quaternion::real(0.5), 1e-8).is_err());
        let p = positive(&mut rng, 2);
        assert!(check_eigenspace_reducing(&p, Quaternion::real(1.0), 1e-8).unwrap().holds());
    }
}
