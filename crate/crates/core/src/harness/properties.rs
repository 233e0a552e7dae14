//! Named properties: each one knows how to draw a random instance and how
//! to score it with the oracles.
//!
//! Scores are *relative margins*: the oracle margin rescaled so that the
//! property holds at an instance exactly when the score is `≥ −tol`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QopError, Result};
use crate::harness::gen::{ginibre, hermitian, near_normal, ordered_pair, positive, random_normal, random_unitary};
use crate::harness::rng::QRng;
use crate::linalg::{operator_norm, QMatrix, QVector};
use crate::oracles::{
    check_aluthge_theorems, check_chain_semihypo, check_eigenspace_reducing, check_furuta, check_gcsi_closure,
    check_gcsi_implies, check_holder_mccarthy, check_kernel_reduction, check_lowner_heinz, check_tu_star,
    collapse_check, conjugation_lemma_residual, lowner_heinz_probe, scale_of, spectrum_product_check, ClosureOp,
    FurutaMode, Margin, Witness, BETA_GRID,
};
use crate::quaternion::Quaternion;

/// Exponents used for Löwner–Heinz trials.
pub const LH_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Exponents used for Hölder–McCarthy trials.
pub const HM_GRID: [f64; 6] = [0.3, 0.5, 0.7, 1.5, 2.0, 3.0];
/// Exponents used for the collapse trials.
pub const COLLAPSE_GRID: [f64; 3] = [0.25, 0.5, 1.0];
/// Pair evaluations per GCSI margin inside a trial.
pub const TRIAL_GCSI_BUDGET: usize = 300;
/// Normality residual (relative to scale) above which the collapse property
/// expects a negative p-hyponormal margin.
pub const NON_NORMAL_THRESHOLD: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    LownerHeinz,
    HolderMcCarthy,
    Furuta,
    Chain,
    Aluthge,
    AluthgeGain,
    EigenspaceReducing,
    GcsiClosure,
    KernelReduction,
    TuStar,
    GcsiImplies,
    Collapse,
    SpectrumStTs,
    ConjugationLemma,
}

impl Property {
    pub const ALL: [Property; 14] = [
        Property::LownerHeinz,
        Property::HolderMcCarthy,
        Property::Furuta,
        Property::Chain,
        Property::Aluthge,
        Property::AluthgeGain,
        Property::EigenspaceReducing,
        Property::GcsiClosure,
        Property::KernelReduction,
        Property::TuStar,
        Property::GcsiImplies,
        Property::Collapse,
        Property::SpectrumStTs,
        Property::ConjugationLemma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::LownerHeinz => "lowner-heinz",
            Property::HolderMcCarthy => "holder-mccarthy",
            Property::Furuta => "furuta",
            Property::Chain => "chain",
            Property::Aluthge => "aluthge",
            Property::AluthgeGain => "aluthge-gain",
            Property::EigenspaceReducing => "eigenspace-reducing",
            Property::GcsiClosure => "gcsi-closure",
            Property::KernelReduction => "kernel-reduction",
            Property::TuStar => "tu-star",
            Property::GcsiImplies => "gcsi-implies",
            Property::Collapse => "collapse",
            Property::SpectrumStTs => "spectrum-st-ts",
            Property::ConjugationLemma => "conjugation-lemma",
        }
    }

    /// What a trial draws in normal and in probe mode.
    pub fn description(self) -> &'static str {
        match self {
            Property::LownerHeinz => "S ⪰ T ⪰ 0 ⇒ S^r ⪰ T^r for r in 0.1..0.9 (probe: one r in [1.5, 3))",
            Property::HolderMcCarthy => "Hölder–McCarthy inequality for r in {0.3, 0.5, 0.7, 1.5, 2, 3}",
            Property::Furuta => "both Furuta inequalities for admissible p, q, r (probe: (1+2r)q < p+2r)",
            Property::Chain => "U*|T|U ⪰ |T| ⪰ U|T|U* for semi-hyponormal T (probe: near-normal T)",
            Property::Aluthge => "Aluthge transform of p-hyponormal T, p in [1/2, 1), is hyponormal",
            Property::AluthgeGain => "Aluthge transform of p-hyponormal T, p in (0, 1/2), is (p+1/2)-hyponormal",
            Property::EigenspaceReducing => "ker Δ_q(U) reduces T for q a right eigenvalue of the polar factor U",
            Property::GcsiClosure => "GCSI is stable under real scalars, inverses, unitary equivalence, compressions (probe: quaternion scalars)",
            Property::KernelReduction => "GCSI ⇒ ker T ⊂ ker T* and ker T = ker T² (probe: arbitrary singular T)",
            Property::TuStar => "GCSI ⇒ ‖TU*x‖² ≤ ‖T²U*x‖‖U*x‖ (probe: arbitrary T)",
            Property::GcsiImplies => "p-hyponormal ⇒ GCSI ⇒ paranormal, consistency of the three oracles",
            Property::Collapse => "trace identity and: non-normal T is never certified p-hyponormal",
            Property::SpectrumStTs => "σ_S(ST) ∪ {0} = σ_S(TS) ∪ {0} and r_S(ST) = r_S(TS)",
            Property::ConjugationLemma => "f(USU*) = U f(S) U* for a shifted square root f",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = QopError;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| QopError::InvalidParameter(format!("unknown property `{s}`")))
    }
}

/// Everything a trial evaluates, in serializable form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub matrices: Vec<QMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<QVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quaternion: Option<Quaternion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub op: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl Instance {
    fn with_matrices(matrices: Vec<QMatrix>) -> Self {
        Instance { matrices, ..Default::default() }
    }

    fn param(mut self, k: &str, v: f64) -> Self {
        self.params.insert(k.to_string(), v);
        self
    }

    fn get(&self, k: &str) -> Result<f64> {
        self.params.get(k).copied().ok_or_else(|| QopError::InvalidParameter(format!("instance lacks parameter `{k}`")))
    }

    fn matrix(&self, i: usize) -> Result<&QMatrix> {
        self.matrices.get(i).ok_or_else(|| QopError::InvalidParameter(format!("instance lacks matrix #{i}")))
    }

    fn vector(&self) -> Result<&QVector> {
        self.vector.as_ref().ok_or_else(|| QopError::InvalidParameter("instance lacks a vector".into()))
    }
}

/// Score of one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    /// Relative margin; the property holds iff `margin ≥ −tol`.
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Evaluation {
    fn from_margin(m: &Margin, tol: f64) -> Self {
        Evaluation { margin: m.relative(tol), witness: m.witness.clone() }
    }

    fn min(self, other: Evaluation) -> Evaluation {
        if other.margin < self.margin {
            other
        } else {
            self
        }
    }

    fn tag_parameter(mut self, value: f64) -> Self {
        self.witness = match self.witness {
            Some(Witness::Vector { x }) => Some(Witness::ParameterVector { value, x }),
            None => Some(Witness::Parameter { value }),
            other => other,
        };
        self
    }
}

fn min_over<I: IntoIterator<Item = Result<Evaluation>>>(items: I) -> Result<Evaluation> {
    let mut best: Option<Evaluation> = None;
    for e in items {
        let e = e?;
        best = Some(match best {
            None => e,
            Some(b) => b.min(e),
        });
    }
    best.ok_or_else(|| QopError::InvalidParameter("empty parameter grid".into()))
}

/// Normal operator `W diag(d) W*` with `zeros` of the diagonal entries set to 0.
fn normal_with_zeros(rng: &mut QRng, n: usize, zeros: usize) -> QMatrix {
    let mut d: Vec<Quaternion> = (0..n).map(|_| rng.quaternion()).collect();
    for q in d.iter_mut().take(zeros) {
        *q = Quaternion::ZERO;
    }
    let w = random_unitary(rng, n);
    &(&w * &QMatrix::diag(&d)) * &w.adjoint()
}

impl Property {
    /// Draws the instance for one trial. Identical arguments give identical
    /// instances.
    pub fn generate(self, seed: u64, dim: usize, probe: bool) -> Instance {
        let n = dim;
        let mut rng = QRng::new(seed);
        let rng = &mut rng;
        match self {
            Property::LownerHeinz => {
                let (a, b) = ordered_pair(rng, n);
                let inst = Instance::with_matrices(vec![a, b]);
                if probe {
                    inst.param("r", rng.uniform_in(1.5, 3.0))
                } else {
                    inst
                }
            }
            Property::HolderMcCarthy => {
                let t = positive(rng, n);
                Instance { vector: Some(rng.gaussian_vector(n)), ..Instance::with_matrices(vec![t]) }
            }
            Property::Furuta => {
                let (a, b) = ordered_pair(rng, n);
                let (p, q, r) = if probe {
                    // p > 1 is needed for (1 + 2r)q < p + 2r to be reachable with q ≥ 1
                    let p = rng.uniform_in(1.5, 3.0);
                    let r = rng.uniform_in(0.0, 2.0);
                    let qmax = (p + 2.0 * r) / (1.0 + 2.0 * r);
                    (p, rng.uniform_in(1.0, qmax), r)
                } else {
                    let p = rng.uniform_in(0.0, 3.0);
                    let r = rng.uniform_in(0.0, 2.0);
                    let qmin = ((p + 2.0 * r) / (1.0 + 2.0 * r)).max(1.0);
                    (p, rng.uniform_in(qmin, 3.0), r)
                };
                Instance::with_matrices(vec![a, b]).param("p", p).param("q", q).param("r", r)
            }
            Property::Chain => {
                if probe {
                    let eps = 10f64.powf(rng.uniform_in(-6.0, -2.0));
                    Instance::with_matrices(vec![near_normal(rng, n, eps)]).param("eps", eps)
                } else {
                    Instance::with_matrices(vec![random_normal(rng, n)])
                }
            }
            Property::Aluthge | Property::AluthgeGain => {
                let p = if self == Property::Aluthge { rng.uniform_in(0.5, 1.0) } else { rng.uniform_in(0.01, 0.5) };
                let t = if probe {
                    let eps = 10f64.powf(rng.uniform_in(-6.0, -2.0));
                    let t = near_normal(rng, n, eps);
                    return Instance::with_matrices(vec![t]).param("p", p).param("eps", eps);
                } else if rng.index(2) == 0 {
                    random_normal(rng, n)
                } else {
                    random_unitary(rng, n)
                };
                Instance::with_matrices(vec![t]).param("p", p)
            }
            Property::EigenspaceReducing => {
                let u = rng.unit_quaternion();
                let mut d: Vec<Quaternion> = vec![u];
                d.extend((1..n).map(|_| rng.quaternion()));
                let w = random_unitary(rng, n);
                let t = &(&w * &QMatrix::diag(&d)) * &w.adjoint();
                let v = rng.unit_quaternion();
                let q = v.conj() * u * v;
                Instance { quaternion: Some(q), ..Instance::with_matrices(vec![t]) }
            }
            Property::GcsiClosure => {
                let d: Vec<Quaternion> = (0..n).map(|_| rng.quaternion()).collect();
                let w = random_unitary(rng, n);
                let t = &(&w * &QMatrix::diag(&d)) * &w.adjoint();
                let beta = BETA_GRID[rng.index(BETA_GRID.len())];
                let mut inst = Instance::with_matrices(vec![t]).param("beta", beta);
                if probe {
                    inst.op = Some("quaternion-scalar".into());
                    inst.quaternion = Some(rng.quaternion());
                    return inst;
                }
                match rng.index(4) {
                    0 => {
                        inst.op = Some("scalar".into());
                        inst = inst.param("r", rng.uniform_in(-3.0, 3.0));
                    }
                    1 => inst.op = Some("inverse".into()),
                    2 => {
                        inst.op = Some("unitary-equiv".into());
                        inst.matrices.push(random_unitary(rng, n));
                    }
                    _ => {
                        inst.op = Some("compression".into());
                        let k = 1 + rng.index(n);
                        let wk = QMatrix::from_columns(&w.columns()[..k]).expect("equal lengths");
                        inst.matrices.push((&wk * &wk.adjoint()).hermitian_part());
                    }
                }
                inst
            }
            Property::KernelReduction | Property::TuStar => {
                let t = if probe {
                    let g = ginibre(rng, n);
                    let mut d = vec![1.0; n];
                    d[n - 1] = 0.0;
                    &g * &QMatrix::real_diag(&d)
                } else {
                    let zeros = rng.index(n);
                    normal_with_zeros(rng, n, zeros)
                };
                let mut inst = Instance::with_matrices(vec![t]);
                if self == Property::TuStar {
                    inst.vector = Some(rng.gaussian_vector(n));
                }
                inst
            }
            Property::GcsiImplies => {
                let p = rng.uniform_in(0.05, 1.0);
                let t = if probe {
                    if rng.index(2) == 0 {
                        ginibre(rng, n)
                    } else {
                        near_normal(rng, n, 1e-2)
                    }
                } else {
                    random_normal(rng, n)
                };
                Instance::with_matrices(vec![t]).param("p", p)
            }
            Property::Collapse => {
                let t = match rng.index(3) {
                    0 => ginibre(rng, n),
                    1 => {
                        let eps = 10f64.powf(rng.uniform_in(-3.0, -1.0));
                        near_normal(rng, n, eps)
                    }
                    _ => random_normal(rng, n),
                };
                Instance::with_matrices(vec![t])
            }
            Property::SpectrumStTs => Instance::with_matrices(vec![ginibre(rng, n), ginibre(rng, n)]),
            Property::ConjugationLemma => {
                let u = random_unitary(rng, n);
                let s = hermitian(rng, n);
                let shift = operator_norm(&s) + 1.0;
                Instance::with_matrices(vec![u, s]).param("shift", shift)
            }
        }
    }

    /// Scores an instance. Precondition failures and malformed instances are
    /// errors, not violations.
    pub fn evaluate(self, inst: &Instance, probe: bool, tol: f64) -> Result<Evaluation> {
        match self {
            Property::LownerHeinz => {
                let (s, t) = (inst.matrix(0)?, inst.matrix(1)?);
                match inst.params.get("r") {
                    Some(&r) if probe => {
                        Ok(Evaluation::from_margin(&lowner_heinz_probe(s, t, r, tol)?, tol).tag_parameter(r))
                    }
                    Some(&r) => Ok(Evaluation::from_margin(&check_lowner_heinz(s, t, r, tol)?, tol).tag_parameter(r)),
                    None => min_over(LH_GRID.iter().map(|&r| {
                        Ok(Evaluation::from_margin(&check_lowner_heinz(s, t, r, tol)?, tol).tag_parameter(r))
                    })),
                }
            }
            Property::HolderMcCarthy => {
                let (t, x) = (inst.matrix(0)?, inst.vector()?);
                let grid: Vec<f64> = match inst.params.get("r") {
                    Some(&r) => vec![r],
                    None => HM_GRID.to_vec(),
                };
                min_over(
                    grid.into_iter()
                        .map(|r| Ok(Evaluation::from_margin(&check_holder_mccarthy(t, x, r, tol)?, tol).tag_parameter(r))),
                )
            }
            Property::Furuta => {
                let (a, b) = (inst.matrix(0)?, inst.matrix(1)?);
                let mode = if probe { FurutaMode::Probe } else { FurutaMode::Strict };
                let (m1, m2) = check_furuta(a, b, inst.get("p")?, inst.get("q")?, inst.get("r")?, tol, mode)?;
                Ok(Evaluation::from_margin(&m1, tol).min(Evaluation::from_margin(&m2, tol)))
            }
            Property::Chain => {
                let (m1, m2) = check_chain_semihypo(inst.matrix(0)?, tol, probe)?;
                Ok(Evaluation::from_margin(&m1, tol).min(Evaluation::from_margin(&m2, tol)))
            }
            Property::Aluthge | Property::AluthgeGain => {
                let p = inst.get("p")?;
                let r = check_aluthge_theorems(inst.matrix(0)?, p, tol, probe)?;
                Ok(Evaluation { margin: r.min_relative(tol), witness: r.main.witness.clone() })
            }
            Property::EigenspaceReducing => {
                let q = inst.quaternion.ok_or_else(|| QopError::InvalidParameter("instance lacks q".into()))?;
                Ok(Evaluation::from_margin(&check_eigenspace_reducing(inst.matrix(0)?, q, tol)?, tol))
            }
            Property::GcsiClosure => {
                let t = inst.matrix(0)?;
                let op = match inst.op.as_deref() {
                    Some("scalar") => ClosureOp::Scalar(inst.get("r")?),
                    Some("quaternion-scalar") => ClosureOp::QuaternionScalar(
                        inst.quaternion.ok_or_else(|| QopError::InvalidParameter("instance lacks q".into()))?,
                    ),
                    Some("inverse") => ClosureOp::Inverse,
                    Some("unitary-equiv") => ClosureOp::UnitaryEquiv(inst.matrix(1)?.clone()),
                    Some("compression") => ClosureOp::Compression(inst.matrix(1)?.clone()),
                    other => return Err(QopError::InvalidParameter(format!("unknown closure op {other:?}"))),
                };
                let r = check_gcsi_closure(t, &op, inst.get("beta")?, TRIAL_GCSI_BUDGET, 0, tol)?;
                Ok(Evaluation::from_margin(&r.transformed, tol))
            }
            Property::KernelReduction => {
                let r = check_kernel_reduction(inst.matrix(0)?, tol)?;
                let mut margin = Margin::new(-r.star_leak, tol);
                if !r.equal {
                    margin.value = margin.value.min(-1.0);
                }
                Ok(Evaluation::from_margin(&margin, tol))
            }
            Property::TuStar => {
                Ok(Evaluation::from_margin(&check_tu_star(inst.matrix(0)?, inst.vector()?, tol)?, tol))
            }
            Property::GcsiImplies => {
                let r = check_gcsi_implies(inst.matrix(0)?, inst.get("p")?, TRIAL_GCSI_BUDGET, 0, tol)?;
                let consistency = Evaluation { margin: if r.consistent() { 0.0 } else { -1.0 }, witness: None };
                if probe {
                    Ok(consistency)
                } else {
                    Ok(consistency
                        .min(Evaluation::from_margin(&r.p_hyponormal, tol))
                        .min(Evaluation::from_margin(&r.gcsi, tol))
                        .min(Evaluation::from_margin(&r.paranormal, tol)))
                }
            }
            Property::Collapse => {
                let t = inst.matrix(0)?;
                let scale = scale_of(t);
                min_over(COLLAPSE_GRID.iter().map(|&p| {
                    let c = collapse_check(t, p, tol)?;
                    let trace = Evaluation::from_margin(&Margin::new(-c.trace_residual, tol * scale), tol);
                    let implication = if c.normality_residual > NON_NORMAL_THRESHOLD * scale {
                        Evaluation::from_margin(&Margin::new(-c.margin.value, c.margin.tolerance), tol)
                    } else {
                        Evaluation { margin: 0.0, witness: None }
                    };
                    Ok(trace.min(implication).tag_parameter(p))
                }))
            }
            Property::SpectrumStTs => {
                let c = spectrum_product_check(inst.matrix(0)?, inst.matrix(1)?)?;
                let h = Margin::new(-c.hausdorff, tol * c.scale * 100.0);
                let r = Margin::new(-c.radius_diff, tol * c.scale);
                Ok(Evaluation::from_margin(&h, tol).min(Evaluation::from_margin(&r, tol)))
            }
            Property::ConjugationLemma => {
                let (u, s) = (inst.matrix(0)?, inst.matrix(1)?);
                let shift = inst.get("shift")?;
                let res = conjugation_lemma_residual(u, s, |x| (x + shift).max(0.0).sqrt())?;
                Ok(Evaluation::from_margin(&Margin::new(-res, tol * scale_of(s)), tol))
            }
        }
    }
}
