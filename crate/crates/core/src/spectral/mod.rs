//! Spectral theory through the complex embedding.
//!
//! Selfadjoint operators are diagonalised by cyclic Jacobi on the `2n×2n`
//! Hermitian matrix `χ(T)`; every eigenvalue appears there twice and the
//! pairs are collapsed back to `n` real eigenvalues. Quaternionic
//! eigenvectors are recovered by pulling the complex eigenvectors back to
//! `Hⁿ` and extracting an orthonormal set with pivoted Gram–Schmidt.
//!
//! General operators go through Hessenberg + shifted QR on `χ(T)`. The
//! complex eigenvalues come in conjugate pairs `λ, λ̄`, and each pair is one
//! similarity class of right eigenvalues, reported by its representative with
//! nonnegative imaginary part. In finite dimensions the spherical spectrum is
//! exactly the spherical point spectrum; the residual and continuous parts are
//! empty and are not modelled.

mod jacobi;
mod qr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::linalg::{embed_chi, unembed_vector, QMatrix, QVector};
use crate::quaternion::Quaternion;

/// Relative tolerance for matching the two copies of each eigenvalue of `χ(T)`.
pub const PAIRING_TOL: f64 = 1e-8;
/// Relative selfadjointness tolerance accepted by the Hermitian solver.
pub const SELFADJOINT_TOL: f64 = 1e-8;
/// Relative threshold below which a negative eigenvalue is treated as roundoff.
pub const NEGATIVE_EIG_TOL: f64 = 1e-8;
/// Class-merging and kernel-verification tolerance for spherical spectra.
pub const SPECTRUM_TOL: f64 = 1e-6;

/// Eigen-decomposition `T = V diag(λ) V*` of a selfadjoint quaternionic matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigensystem {
    /// Ascending real eigenvalues, one per quaternionic dimension.
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal right eigenvectors: `T Vⱼ = Vⱼ λⱼ`.
    pub eigenvectors: QMatrix,
}

impl HermitianEigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Largest eigenvalue magnitude, which is the operator norm.
    pub fn spectral_norm(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// `V diag(values) V*`.
    pub fn synthesize(&self, values: &[f64]) -> QMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Quaternion::ZERO;
                for (k, &f) in values.iter().enumerate() {
                    if f != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * f;
                    }
                }
                if i == j {
                    out[(i, i)] = Quaternion::real(acc.w);
                } else {
                    out[(i, j)] = acc;
                    out[(j, i)] = acc.conj();
                }
            }
        }
        out
    }

    /// `f(T) = V diag(f(λ)) V*`; fails if `f` is not finite at an eigenvalue.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<QMatrix> {
        let values = self
            .eigenvalues
            .iter()
            .map(|&l| {
                let y = f(l);
                if y.is_finite() {
                    Ok(y)
                } else {
                    Err(QopError::UndefinedFunction(l))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.synthesize(&values))
    }

    /// Eigenvectors whose eigenvalue satisfies `pred`, in ascending order.
    pub fn vectors_where<P: Fn(f64) -> bool>(&self, pred: P) -> Vec<QVector> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| pred(l))
            .map(|(k, _)| self.eigenvectors.column(k))
            .collect()
    }
}

fn check_selfadjoint(t: &QMatrix) -> Result<()> {
    t.require_square()?;
    let residual = t.selfadjoint_residual();
    let allowed = SELFADJOINT_TOL * t.frobenius_norm();
    if residual > allowed {
        return Err(QopError::NotSelfAdjoint { residual, allowed });
    }
    Ok(())
}

/// Selects `count` orthonormal quaternionic vectors from the pulled-back
/// complex eigenvectors by pivoted modified Gram–Schmidt. Returns the chosen
/// vectors with the index of the source complex eigenvector.
fn extract_quaternion_basis(candidates: Vec<QVector>, count: usize) -> Result<Vec<(usize, QVector)>> {
    let mut residuals = candidates;
    let mut taken = vec![false; residuals.len()];
    let mut chosen = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best = None;
        let mut best_norm = 0.0;
        for (k, r) in residuals.iter().enumerate() {
            if taken[k] {
                continue;
            }
            let nr = r.norm();
            if nr > best_norm {
                best_norm = nr;
                best = Some(k);
            }
        }
        let k = match best {
            Some(k) if best_norm > 0.25 => k,
            _ => {
                return Err(QopError::Pairing(format!(
                    "could not extract {count} orthonormal quaternionic eigenvectors (pivot {best_norm:.3e})"
                )))
            }
        };
        taken[k] = true;
        let q = residuals[k].scale(1.0 / best_norm);
        for (j, r) in residuals.iter_mut().enumerate() {
            if !taken[j] {
                let c = q.inner_unchecked(r);
                *r = &*r - &q.mul_right(c);
            }
        }
        chosen.push((k, q));
    }
    Ok(chosen)
}

/// Eigen-decomposition of a selfadjoint quaternionic matrix.
pub fn hermitian_eig(t: &QMatrix) -> Result<HermitianEigensystem> {
    check_selfadjoint(t)?;
    let n = t.rows();
    if n == 0 {
        return Ok(HermitianEigensystem { eigenvalues: vec![], eigenvectors: QMatrix::zeros(0, 0) });
    }
    let chi = embed_chi(&t.hermitian_part());
    let (values, vectors) = jacobi::jacobi_hermitian(&chi)?;

    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut paired = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = (values[2 * k], values[2 * k + 1]);
        if (a - b).abs() > PAIRING_TOL * scale {
            return Err(QopError::Pairing(format!(
                "eigenvalues {a:.6e} and {b:.6e} of the embedding do not pair"
            )));
        }
        paired.push(0.5 * (a + b));
    }

    let candidates: Vec<QVector> = (0..2 * n)
        .map(|j| {
            let z: Vec<Complex64> = (0..2 * n).map(|i| vectors[(i, j)]).collect();
            unembed_vector(&z)
        })
        .collect();
    let mut chosen = extract_quaternion_basis(candidates, n)?;
    chosen.sort_by(|a, b| values[a.0].total_cmp(&values[b.0]).then(a.0.cmp(&b.0)));
    let cols: Vec<QVector> = chosen.into_iter().map(|(_, v)| v).collect();
    Ok(HermitianEigensystem { eigenvalues: paired, eigenvectors: QMatrix::from_columns(&cols)? })
}

/// Continuous functional calculus `f(T)` for selfadjoint `T`.
pub fn fun_calc<F: Fn(f64) -> f64>(t: &QMatrix, f: F) -> Result<QMatrix> {
    hermitian_eig(t)?.apply(f)
}

/// Clamps roundoff-negative eigenvalues of a positive operator to zero and
/// rejects materially negative ones.
pub(crate) fn clamp_nonnegative(eig: &HermitianEigensystem) -> Result<Vec<f64>> {
    let threshold = NEGATIVE_EIG_TOL * eig.spectral_norm();
    eig.eigenvalues
        .iter()
        .map(|&l| {
            if l < -threshold {
                Err(QopError::NegativeEigenvalue { value: l, threshold: -threshold })
            } else {
                Ok(l.max(0.0))
            }
        })
        .collect()
}

/// `t^p` with the convention `0⁰ = 1`.
#[inline]
pub(crate) fn pow0(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if t == 0.0 {
        0.0
    } else {
        t.powf(p)
    }
}

/// Powers of a positive eigensystem: `V diag(λᵖ) V*`, with `T⁰ = I`.
pub(crate) fn power_from_eig(eig: &HermitianEigensystem, p: f64) -> Result<QMatrix> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(QopError::InvalidParameter(format!("power must be a finite nonnegative real, got {p}")));
    }
    let clamped = clamp_nonnegative(eig)?;
    Ok(eig.synthesize(&clamped.iter().map(|&l| pow0(l, p)).collect::<Vec<_>>()))
}

/// `T^p` for a positive operator `T` and `p ≥ 0`.
pub fn power_psd(t: &QMatrix, p: f64) -> Result<QMatrix> {
    power_from_eig(&hermitian_eig(t)?, p)
}

/// Löwner-order test `T ⪰ 0`: the margin is the smallest eigenvalue and the
/// verdict is `margin ≥ −tol·max(1, ‖T‖)`.
pub fn is_psd(t: &QMatrix, tol: f64) -> Result<(bool, f64)> {
    let eig = hermitian_eig(t)?;
    let margin = eig.min();
    Ok((margin >= -tol * eig.spectral_norm().max(1.0), margin))
}

/// Smallest eigenvalue of a selfadjoint matrix, symmetrising away roundoff
/// asymmetry first. Used for Löwner margins of computed differences.
pub fn min_eigenvalue(t: &QMatrix) -> Result<f64> {
    Ok(hermitian_eig(&t.hermitian_part())?.min())
}

/// `Δ_q(T) = T² − T(q + q̄) + I|q|²`.
pub fn delta_q(t: &QMatrix, q: Quaternion) -> Result<QMatrix> {
    t.delta(q)
}

/// `(m_T, M_T)`: the extreme eigenvalues, equal to the infimum and supremum of
/// the Rayleigh quotient `⟨Tx, x⟩` over unit vectors.
pub fn rayleigh_bounds(t: &QMatrix) -> Result<(f64, f64)> {
    let eig = hermitian_eig(t)?;
    Ok((eig.min(), eig.max()))
}

/// Largest singular value `√λ_max(A*A)`.
pub fn operator_norm(a: &QMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let gram = a.adjoint().matmul(a).expect("A*A is always conformable");
    match hermitian_eig(&gram) {
        Ok(eig) => eig.max().max(0.0).sqrt(),
        // Gram matrices are selfadjoint by construction; fall back to Frobenius
        Err(_) => a.frobenius_norm(),
    }
}

/// Similarity classes of right eigenvalues and the spherical spectral radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphericalSpectrum {
    /// Class representatives `a + b i` with `b ≥ 0`, sorted by real then
    /// imaginary part, duplicates merged.
    pub classes: Vec<Complex64>,
    pub radius: f64,
    /// Smallest singular value of `Δ_c(T)` for each class, in class order.
    #[serde(skip)]
    pub kernel_residuals: Vec<f64>,
    /// True when every class passed the kernel check.
    #[serde(skip)]
    pub verified: bool,
}

/// Groups the `2n` eigenvalues of `χ(T)` into `n` representatives.
fn fold_conjugate_pairs(eigs: &[Complex64]) -> Vec<Complex64> {
    let mut folded: Vec<Complex64> = eigs.iter().map(|z| Complex64::new(z.re, z.im.abs())).collect();
    folded.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut used = vec![false; folded.len()];
    let mut reps = Vec::with_capacity(folded.len() / 2);
    for i in 0..folded.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for j in (i + 1)..folded.len() {
            if !used[j] {
                let d = (folded[i] - folded[j]).norm();
                if d < best_d {
                    best_d = d;
                    best = Some(j);
                }
            }
        }
        let mid = match best {
            Some(j) => {
                used[j] = true;
                (folded[i] + folded[j]) * 0.5
            }
            None => folded[i],
        };
        reps.push(mid);
    }
    reps
}

/// Spherical point spectrum `{q : ker Δ_q(T) ≠ {0}}` as similarity classes.
pub fn spherical_point_spectrum(t: &QMatrix) -> Result<SphericalSpectrum> {
    let n = t.require_square()?;
    if n == 0 {
        return Ok(SphericalSpectrum { classes: vec![], radius: 0.0, kernel_residuals: vec![], verified: true });
    }
    let eigs = qr::eigenvalues_general(&embed_chi(t))?;
    let mut reps = fold_conjugate_pairs(&eigs);
    reps.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let norm = operator_norm(t);
    let scale = norm.max(1.0);
    let merge_tol = SPECTRUM_TOL * scale;
    let mut classes: Vec<Complex64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for r in reps {
        let r = Complex64::new(r.re, r.im.max(0.0));
        match classes.iter().position(|c| (c - r).norm() <= merge_tol) {
            Some(k) => {
                let m = counts[k] as f64;
                classes[k] = (classes[k] * m + r) / (m + 1.0);
                counts[k] += 1;
            }
            None => {
                classes.push(r);
                counts.push(1);
            }
        }
    }
    classes.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let radius = classes.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let allowed = SPECTRUM_TOL * scale * scale;
    let kernel_residuals: Vec<f64> = classes
        .iter()
        .map(|c| {
            let q = Quaternion::from_complex(*c);
            let d = t.delta(q).expect("square");
            smallest_singular_value(&d)
        })
        .collect();
    let verified = kernel_residuals.iter().all(|&s| s <= allowed);
    Ok(SphericalSpectrum { classes, radius, kernel_residuals, verified })
}

/// `√λ_min(A*A)` for a square matrix.
pub fn smallest_singular_value(a: &QMatrix) -> f64 {
    let gram = a.adjoint().matmul(a).expect("A*A is always conformable");
    hermitian_eig(&gram).map(|e| e.min().max(0.0).sqrt()).unwrap_or(f64::NAN)
}
