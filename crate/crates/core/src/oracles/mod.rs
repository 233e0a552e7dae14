//! Operator-class predicates and margin-valued inequality checks.
//!
//! Every check returns a [`Margin`]: the signed slack of the asserted
//! inequality at the evaluated instance. A value `≥ −tolerance` means the
//! inequality holds there.
//!
//! Two kinds of guarantee are on offer. Operator-order statements (`X ⪰ Y`)
//! reduce to a smallest eigenvalue and are decided both ways up to eigensolver
//! accuracy. Statements quantified over all vectors or pairs (paranormality,
//! the generalized Cauchy–Schwarz inequality) are only *certified on failure*:
//! a negative margin comes with the vector or pair that violates it, while a
//! nonnegative margin is evidence from a finite, seeded search.

mod classes;
mod gcsi;
mod inequalities;
mod spectral_identities;

use serde::Serialize;

use crate::linalg::{operator_norm, QMatrix, QVector};

pub use classes::{
    classify_basic, collapse_check, is_p_hyponormal, is_paranormal, paranormal_report, BasicClassification,
    ClassFlag, CollapseReport, ParanormalReport, PARANORMAL_GRID,
};
pub use gcsi::{
    check_gcsi_closure, check_gcsi_implies, check_kernel_reduction, check_tu_star, gcsi_margin, gcsi_sweep,
    ClosureOp, ClosureReport, GcsiSweep, ImpliesReport, KernelReport, BETA_GRID, DEFAULT_GCSI_BUDGET,
};
pub use inequalities::{
    check_aluthge_theorems, check_chain_semihypo, check_eigenspace_reducing, check_furuta, check_holder_mccarthy,
    check_lowner_heinz, furuta_admissible, lowner_heinz_probe, AluthgeReport, CorollaryReading, FurutaMode,
};
pub use spectral_identities::{conjugation_lemma_residual, hausdorff_with_zero, spectrum_product_check, ProductCheck};

/// Default relative tolerance for all oracles.
pub const DEFAULT_TOL: f64 = 1e-8;

/// What achieves a margin's minimum.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Vector { x: QVector },
    Pair { x: QVector, y: QVector },
    Parameter { value: f64 },
    ParameterVector { value: f64, x: QVector },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Margin {
    /// `≥ 0` means the inequality holds; negative values measure violation.
    pub value: f64,
    /// Absolute slack allowed for roundoff.
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Margin {
    pub fn new(value: f64, tolerance: f64) -> Self {
        Margin { value, tolerance, witness: None }
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    /// The inequality holds up to tolerance.
    pub fn holds(&self) -> bool {
        self.value >= -self.tolerance
    }

    /// The inequality fails beyond tolerance.
    pub fn violated(&self) -> bool {
        !self.holds()
    }

    /// Margin in units of its own scale: `value / tolerance · tol`, so that
    /// margins of different magnitudes can be compared against one `tol`.
    pub fn relative(&self, tol: f64) -> f64 {
        if self.tolerance > 0.0 {
            self.value / self.tolerance * tol
        } else {
            self.value
        }
    }

    /// Componentwise minimum keeping the witness of the smaller one.
    pub fn min(self, other: Margin) -> Margin {
        if other.value < self.value {
            other
        } else {
            self
        }
    }
}

/// `max(1, ‖T‖)`: the operator scale that tolerances are measured against.
pub fn scale_of(t: &QMatrix) -> f64 {
    operator_norm(t).max(1.0)
}
