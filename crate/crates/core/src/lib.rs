//! Numerical analysis of parametrized projective varieties: Gauss-map rank and
//! defect, second fundamental forms, dual varieties and their refined defect,
//! and the pencil singularity test for dual degeneracy.

// `!(a < b)` comparisons deliberately treat NaN as a failed check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalogue;
pub mod duality;
pub mod error;
pub mod gauss;
pub mod numerics;
pub mod report;
pub mod rng;

pub use catalogue::{resolve, Chart, ExpectedInvariants, RuledChart, Ruling};
pub use duality::{DualityConfig, DualityReport, GhMode, GhOutcome};
pub use error::{Error, Result};
pub use gauss::{AnalysisConfig, GaussAnalysis, SecondFundamentalSystem, TangentFrame};
pub use numerics::{Jet2, RankDecision, RankPolicy, Taylor2};
pub use report::{ExitStatus, OutputFormat, RunConfig};
