//! Eigenvalues of a general complex matrix: Householder reduction to upper
//! Hessenberg form followed by single-shift complex QR with Wilkinson shifts
//! and deflation.

use num_complex::Complex64;

use crate::error::{QopError, Result};
use crate::linalg::ComplexMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reduces `h` (row-major, `m×m`) to upper Hessenberg form in place.
fn hessenberg(h: &mut [Complex64], m: usize) {
    if m < 3 {
        return;
    }
    let mut v = vec![ZERO; m];
    for k in 0..m - 2 {
        let mut norm2 = 0.0;
        for i in (k + 1)..m {
            norm2 += h[i * m + k].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1) * m + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        for i in 0..m {
            v[i] = ZERO;
        }
        for i in (k + 1)..m {
            v[i] = h[i * m + k];
        }
        v[k + 1] -= alpha;
        let vnorm = v[(k + 1)..m].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v[(k + 1)..m].iter_mut() {
            *z /= vnorm;
        }
        // H ← (I − 2vvᴴ) H
        for j in 0..m {
            let mut dot = ZERO;
            for i in (k + 1)..m {
                dot += v[i].conj() * h[i * m + j];
            }
            for i in (k + 1)..m {
                h[i * m + j] -= v[i] * dot * 2.0;
            }
        }
        // H ← H (I − 2vvᴴ)
        for i in 0..m {
            let mut dot = ZERO;
            for j in (k + 1)..m {
                dot += h[i * m + j] * v[j];
            }
            for j in (k + 1)..m {
                h[i * m + j] -= dot * v[j].conj() * 2.0;
            }
        }
        for i in (k + 2)..m {
            h[i * m + k] = ZERO;
        }
    }
}

/// Eigenvalue of the trailing 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let l1 = mid + disc;
    let l2 = mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// All eigenvalues of a square complex matrix (unordered). The iteration cap
/// is `100·m` QR steps in total.
pub(crate) fn eigenvalues_general(mat: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let m = mat.rows();
    debug_assert_eq!(m, mat.cols());
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut h = mat.data().to_vec();
    hessenberg(&mut h, m);

    let cap = 100 * m;
    let mut eig = vec![ZERO; m];
    let mut hi = m - 1;
    let mut iters = 0usize;
    let mut since_deflation = 0usize;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(m);

    loop {
        if hi == 0 {
            eig[0] = h[0];
            break;
        }
        // locate the active unreduced block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo * m + lo - 1].norm();
            let diag = h[(lo - 1) * m + lo - 1].norm() + h[lo * m + lo].norm();
            let scale = if diag == 0.0 { 1.0 } else { diag };
            if sub <= f64::EPSILON * scale {
                h[lo * m + lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[hi * m + hi];
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if iters == cap {
            return Err(QopError::NoConvergence(cap));
        }
        iters += 1;
        since_deflation += 1;

        let mut shift = wilkinson_shift(
            h[(hi - 1) * m + hi - 1],
            h[(hi - 1) * m + hi],
            h[hi * m + hi - 1],
            h[hi * m + hi],
        );
        if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            let t = h[hi * m + hi - 1].norm() + if hi >= 2 { h[(hi - 1) * m + hi - 2].norm() } else { 0.0 };
            shift = h[hi * m + hi] + Complex64::new(0.75 * t, 0.43 * t);
        }

        for k in lo..=hi {
            h[k * m + k] -= shift;
        }
        // QR by Givens rotations on the active block
        rot.clear();
        for k in lo..hi {
            let a = h[k * m + k];
            let b = h[(k + 1) * m + k];
            let nu = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if nu == 0.0 {
                (1.0, ZERO)
            } else if a.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                (a.norm() / nu, (a / a.norm()) * b.conj() / nu)
            };
            for j in k..=hi {
                let x = h[k * m + j];
                let y = h[(k + 1) * m + j];
                h[k * m + j] = x * c + s * y;
                h[(k + 1) * m + j] = -s.conj() * x + y * c;
            }
            rot.push((c, s));
        }
        // RQ
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = lo + idx;
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let x = h[i * m + k];
                let y = h[i * m + k + 1];
                h[i * m + k] = x * c + s.conj() * y;
                h[i * m + k + 1] = -s * x + y * c;
            }
        }
        for k in lo..=hi {
            h[k * m + k] += shift;
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn rotation_generator() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let e = sorted(eigenvalues_general(&m).unwrap());
        assert!((e[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn triangular_input() {
        let m = ComplexMatrix::from_vec(
            3,
            3,
            vec![c(1.0, 0.0), c(2.0, 1.0), c(3.0, 0.0), c(0.0, 0.0), c(-2.0, 1.0), c(1.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)],
        )
        .unwrap();
        let e = sorted(eigenvalues_general(&m).unwrap());
        let expected = [c(-2.0, 1.0), c(1.0, 0.0), c(5.0, 0.0)];
        for (a, b) in e.iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn matches_nalgebra_on_random_matrix() {
        let n = 9;
        let mut seed = 99u64;
        let mut next = || {
            seed = crate::harness::rng::splitmix64(seed);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let data: Vec<Complex64> = (0..n * n).map(|_| c(next(), next())).collect();
        let m = ComplexMatrix::from_vec(n, n, data.clone()).unwrap();
        let ours = sorted(eigenvalues_general(&m).unwrap());
        let nm = nalgebra::DMatrix::from_row_slice(n, n, &data);
        let oracle = sorted(nalgebra::Schur::new(nm).eigenvalues().expect("complex schur").iter().copied().collect());
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn nilpotent_block() {
        let m = ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let e = eigenvalues_general(&m).unwrap();
        assert!(e.iter().all(|z| z.norm() < 1e-12));
    }
}
