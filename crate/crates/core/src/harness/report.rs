//! Verification runs and their JSON reports.

use serde::Serialize;

use crate::error::{QopError, Result};
use crate::harness::exec::{argmin, map_trials, Execution};
use crate::harness::properties::{Evaluation, Instance, Property};
use crate::harness::rng::trial_seed;
use crate::linalg::MAX_DIM;
use crate::oracles::{Witness, DEFAULT_TOL};

/// Largest dimension accepted by theorem suites.
pub const SUITE_MAX_DIM: usize = 8;
pub const DEFAULT_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub dim: usize,
    pub probe: bool,
    pub tol: f64,
    pub execution: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { trials: 100, seed: 0, dim: DEFAULT_DIM, probe: false, tol: DEFAULT_TOL, execution: Execution::Parallel }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub seed: u64,
    pub margin: f64,
}

/// The instance behind the smallest margin, with the oracle's own witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportWitness {
    pub trial: usize,
    pub seed: u64,
    pub instance: Instance,
    /// Shrunk form of `instance` (fuzz runs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimized: Option<Instance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub property: String,
    pub trials: usize,
    pub seed: u64,
    pub dim: usize,
    pub probe: bool,
    pub tolerance: f64,
    pub min_margin: f64,
    /// Present iff `min_margin < −tolerance`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ReportWitness>,
    pub per_trial: Vec<TrialResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are finite")
    }
}

fn check_config(cfg: &VerifyConfig, max_dim: usize) -> Result<()> {
    if cfg.trials == 0 {
        return Err(QopError::InvalidParameter("trials must be positive".into()));
    }
    if cfg.dim == 0 || cfg.dim > max_dim {
        return Err(QopError::InvalidParameter(format!("dim must lie in 1..={max_dim}, got {}", cfg.dim)));
    }
    if !(cfg.tol >= 0.0) || !cfg.tol.is_finite() {
        return Err(QopError::InvalidParameter(format!("tolerance must be finite and nonnegative, got {}", cfg.tol)));
    }
    Ok(())
}

/// Runs `cfg.trials` trials of `property`. Trial `t` uses seed
/// `trial_seed(cfg.seed, t)` and dimension `dim_of(t, seed)`. The first trial (by
/// index) that errors aborts the run with that error.
pub(crate) fn run_trials<D>(property: Property, cfg: &VerifyConfig, dim_of: D) -> Result<Vec<(u64, Evaluation)>>
where
    D: Fn(usize, u64) -> usize + Sync + Send,
{
    let results = map_trials(cfg.trials, cfg.execution, |t| {
        let seed = trial_seed(cfg.seed, t as u64);
        let inst = property.generate(seed, dim_of(t, seed), cfg.probe);
        property.evaluate(&inst, cfg.probe, cfg.tol).map(|e| (seed, e))
    });
    results
        .into_iter()
        .enumerate()
        .map(|(t, r)| r.map_err(|e| QopError::Precondition(format!("trial {t}: {e}"))))
        .collect()
}

pub(crate) fn assemble(
    property: Property,
    cfg: &VerifyConfig,
    results: Vec<(u64, Evaluation)>,
    dim_of: impl Fn(usize, u64) -> usize,
) -> VerificationReport {
    let margins: Vec<f64> = results.iter().map(|(_, e)| e.margin).collect();
    let (worst, min_margin) = argmin(&margins).expect("at least one trial");
    let witness = (min_margin < -cfg.tol).then(|| {
        let (seed, eval) = &results[worst];
        ReportWitness {
            trial: worst,
            seed: *seed,
            instance: property.generate(*seed, dim_of(worst, *seed), cfg.probe),
            minimized: None,
            detail: eval.witness.clone(),
        }
    });
    VerificationReport {
        property: property.name().to_string(),
        trials: cfg.trials,
        seed: cfg.seed,
        dim: cfg.dim,
        probe: cfg.probe,
        tolerance: cfg.tol,
        min_margin,
        witness,
        per_trial: results.iter().map(|(seed, e)| TrialResult { seed: *seed, margin: e.margin }).collect(),
    }
}

/// `verify <property>`: fixed dimension, at most [`SUITE_MAX_DIM`].
pub fn verify(property: Property, cfg: &VerifyConfig) -> Result<VerificationReport> {
    check_config(cfg, SUITE_MAX_DIM)?;
    let dim = cfg.dim;
    let results = run_trials(property, cfg, |_, _| dim)?;
    Ok(assemble(property, cfg, results, |_, _| dim))
}

/// Dimension of the fuzz trial with the given seed: `2 + seed mod (max − 1)`,
/// or 1 when `max = 1`.
pub(crate) fn fuzz_dim(seed: u64, max: usize) -> usize {
    let lo = if max >= 2 { 2 } else { 1 };
    lo + (seed % (max - lo + 1) as u64) as usize
}

pub(crate) fn check_fuzz_config(cfg: &VerifyConfig) -> Result<()> {
    check_config(cfg, MAX_DIM)
}
