//! Counterexample shrinking and the fuzz driver.

use crate::error::{QopError, Result};
use crate::harness::properties::{Instance, Property};
use crate::harness::report::{assemble, check_fuzz_config, fuzz_dim, run_trials, VerificationReport, VerifyConfig};
use crate::linalg::QMatrix;
use crate::quaternion::Quaternion;

/// Evaluations allowed for shrinking a fuzz witness.
pub const DEFAULT_SHRINK_BUDGET: usize = 2000;

/// Simpler values to try in place of `v`, most aggressive first.
fn candidates(v: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(4);
    for c in [0.0, v.round(), (v * 2.0).round() / 2.0, (v * 10.0).round() / 10.0] {
        if c != v && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn set_component(q: Quaternion, c: usize, v: f64) -> Quaternion {
    let mut a = q.to_array();
    a[c] = v;
    Quaternion::from_array(a)
}

/// One coordinate of an instance that can be shrunk.
#[derive(Clone, Copy, Debug)]
enum Coord {
    /// Entry `(i, j)` component `c` of matrix `m`; mirrored to `(j, i)` when
    /// the matrix is selfadjoint.
    Matrix { m: usize, i: usize, j: usize, c: usize, mirror: bool },
    Vector { i: usize, c: usize },
}

fn coordinates(inst: &Instance) -> Vec<Coord> {
    let mut out = Vec::new();
    for (m, mat) in inst.matrices.iter().enumerate() {
        let mirror = mat.is_square() && mat.selfadjoint_residual() <= 1e-14 * mat.frobenius_norm().max(1.0);
        for i in 0..mat.rows() {
            for j in 0..mat.cols() {
                if mirror && j < i {
                    continue;
                }
                let comps = if mirror && i == j { 1 } else { 4 };
                for c in 0..comps {
                    out.push(Coord::Matrix { m, i, j, c, mirror });
                }
            }
        }
    }
    if let Some(v) = &inst.vector {
        for i in 0..v.len() {
            for c in 0..4 {
                out.push(Coord::Vector { i, c });
            }
        }
    }
    out
}

fn read(inst: &Instance, at: Coord) -> f64 {
    match at {
        Coord::Matrix { m, i, j, c, .. } => inst.matrices[m][(i, j)].to_array()[c],
        Coord::Vector { i, c } => inst.vector.as_ref().expect("vector coordinate")[i].to_array()[c],
    }
}

fn write(inst: &Instance, at: Coord, v: f64) -> Instance {
    let mut out = inst.clone();
    match at {
        Coord::Matrix { m, i, j, c, mirror } => {
            let mat: &mut QMatrix = &mut out.matrices[m];
            let q = set_component(mat[(i, j)], c, v);
            mat[(i, j)] = q;
            if mirror && i != j {
                mat[(j, i)] = q.conj();
            }
        }
        Coord::Vector { i, c } => {
            let vec = out.vector.as_mut().expect("vector coordinate");
            vec[i] = set_component(vec[i], c, v);
        }
    }
    out
}

/// Shrinks a violating instance one coordinate at a time towards zero and
/// towards short decimals, keeping a change only while the instance still
/// violates the property by more than `tol` (and still meets its
/// preconditions). Passes run in a fixed order until nothing changes or
/// `budget` evaluations are spent, so the result is deterministic.
pub fn minimize_counterexample(
    property: Property,
    instance: &Instance,
    budget: usize,
    probe: bool,
    tol: f64,
) -> Result<Instance> {
    let start = property.evaluate(instance, probe, tol)?;
    if start.margin >= -tol {
        return Err(QopError::Precondition(format!(
            "instance does not violate {property} (margin {:e})",
            start.margin
        )));
    }
    let violates = |inst: &Instance| property.evaluate(inst, probe, tol).map(|e| e.margin < -tol).unwrap_or(false);
    let mut current = instance.clone();
    let mut used = 0usize;
    loop {
        let mut changed = false;
        for at in coordinates(&current) {
            let v = read(&current, at);
            for c in candidates(v) {
                if used >= budget {
                    return Ok(current);
                }
                used += 1;
                let next = write(&current, at, c);
                if violates(&next) {
                    current = next;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            return Ok(current);
        }
    }
}

/// `fuzz <property>`: `cfg.trials` trials with dimensions drawn from
/// `2..=cfg.dim`, then the worst violating instance (if any) is shrunk with
/// [`minimize_counterexample`] and reported alongside the original.
pub fn fuzz(property: Property, cfg: &VerifyConfig, shrink_budget: usize) -> Result<VerificationReport> {
    check_fuzz_config(cfg)?;
    let max = cfg.dim;
    let dim_of = move |_: usize, seed: u64| fuzz_dim(seed, max);
    let results = run_trials(property, cfg, dim_of)?;
    let mut report = assemble(property, cfg, results, dim_of);
    if let Some(w) = report.witness.as_mut() {
        w.minimized = Some(minimize_counterexample(property, &w.instance, shrink_budget, cfg.probe, cfg.tol)?);
    }
    Ok(report)
}
