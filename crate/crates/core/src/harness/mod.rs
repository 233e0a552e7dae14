//! Seeded generators, the trial runner, verification reports and
//! counterexample shrinking.

pub mod exec;
pub mod gen;
pub mod minimize;
pub mod properties;
pub mod report;
pub mod rng;

pub use exec::Execution;
pub use minimize::{fuzz, minimize_counterexample, DEFAULT_SHRINK_BUDGET};
pub use properties::{Evaluation, Instance, Property};
pub use report::{verify, ReportWitness, TrialResult, VerificationReport, VerifyConfig, DEFAULT_DIM, SUITE_MAX_DIM};
