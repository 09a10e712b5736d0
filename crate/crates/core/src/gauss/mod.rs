//! Gauss-map analysis at a sample point: tangent frame, rank and defect of the
//! Gauss map, leaf directions and the second fundamental system.
//!
//! Everything is measured from chart jets. With `ν_α` an orthonormal basis of
//! the normal space and `W` an orthonormal basis of parameter directions that
//! move the point, the unrestricted second fundamental matrices are
//! `Wᵀ (Σ_c ν_αc ∂²x_c) W`. Their common kernel is the leaf, computed from one
//! SVD of the stacked matrices; the rank `r` is `n` minus its dimension.

mod leaf;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

pub use leaf::{
    focus_polynomial, leaf_operators, rank_drop_scan, FocusPolynomial, LeafLine, LeafOperators,
    DEFAULT_SCAN_POINTS,
};

use crate::catalogue::{Chart, MIN_VALUE_NORM};
use crate::error::{Error, Result};
use crate::numerics::rank::{
    canonical_direction, leading_subspaces, nullspace_with_rank, orthogonal_complement,
};
use crate::numerics::{numerical_rank_with, RankDecision, RankPolicy};

/// Resampling attempts after the first ambiguous one.
pub const DEFAULT_MAX_RETRIES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub policy: RankPolicy,
    pub max_retries: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            policy: RankPolicy::default(),
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }
}

impl AnalysisConfig {
    pub fn with_tol(tol: f64) -> Self {
        AnalysisConfig {
            policy: RankPolicy {
                tol,
                ..RankPolicy::default()
            },
            ..AnalysisConfig::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct TangentFrame {
    /// Unit homogeneous point, sign fixed by its largest-magnitude entry.
    pub point: DVector<f64>,
    /// `n` orthonormal columns completing `point` to the tangent space.
    pub tangent_basis: DMatrix<f64>,
    /// `N − n` orthonormal columns spanning the normal complement.
    pub normal_basis: DMatrix<f64>,
    pub param_point: Vec<f64>,
    /// `d × n` orthonormal parameter directions mapped onto `tangent_basis`.
    pub param_basis: DMatrix<f64>,
    /// Signed norm that the raw chart value was divided by.
    pub scale: f64,
    pub decision: RankDecision,
}

impl TangentFrame {
    pub fn dim(&self) -> usize {
        self.tangent_basis.ncols()
    }

    /// Orthonormal basis of the homogeneous tangent space (`n + 1` columns).
    pub fn span(&self) -> DMatrix<f64> {
        let mut cols = vec![self.point.clone()];
        cols.extend(self.tangent_basis.column_iter().map(|c| c.into_owned()));
        DMatrix::from_columns(&cols)
    }
}

#[derive(Clone, Debug)]
pub struct SecondFundamentalSystem {
    /// One symmetric `r × r` matrix per normal direction.
    pub b: Vec<DMatrix<f64>>,
    /// `d × r` parameter directions transversal to the leaf.
    pub transversal_basis: DMatrix<f64>,
    /// `d × l` parameter directions along the leaf.
    pub leaf_basis: DMatrix<f64>,
}

impl SecondFundamentalSystem {
    pub fn rank(&self) -> usize {
        self.transversal_basis.ncols()
    }

    pub fn max_norm(&self) -> f64 {
        self.b.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct GaussAnalysis {
    pub frame: TangentFrame,
    pub n: usize,
    pub r: usize,
    pub l: usize,
    pub sff: SecondFundamentalSystem,
    pub rank_decisions: Vec<RankDecision>,
}

fn non_generic(context: impl Into<String>, audit: Vec<RankDecision>) -> Error {
    Error::NonGeneric {
        context: context.into(),
        attempts: 1,
        audit,
    }
}

pub fn tangent_frame(chart: &Chart, u: &[f64], policy: &RankPolicy) -> Result<TangentFrame> {
    let jet = chart.jet(u)?;
    if jet.value.norm() < MIN_VALUE_NORM {
        return Err(Error::precondition(format!(
            "{} vanishes at {u:?}",
            chart.name()
        )));
    }
    let (point, scale) = canonical_direction(&jet.value);
    let jac = &jet.jacobian / scale;

    let mut span = DMatrix::zeros(jac.ncols() + 1, point.len());
    span.row_mut(0).copy_from(&point.transpose());
    for i in 0..jac.ncols() {
        span.row_mut(i + 1).copy_from(&jac.column(i).transpose());
    }
    let decision = numerical_rank_with(&span, policy)?;
    if decision.ambiguous {
        return Err(non_generic(
            format!("{}: tangent span rank", chart.name()),
            vec![decision],
        ));
    }
    let n = decision.rank.saturating_sub(1);
    let projected = &jac - &point * (point.transpose() * &jac);
    let (tangent_basis, param_basis) = leading_subspaces(&projected, n);

    let mut span_cols = vec![point.clone()];
    span_cols.extend(tangent_basis.column_iter().map(|c| c.into_owned()));
    let normal_basis = orthogonal_complement(&DMatrix::from_columns(&span_cols));

    Ok(TangentFrame {
        point,
        tangent_basis,
        normal_basis,
        param_point: u.to_vec(),
        param_basis,
        scale,
        decision,
    })
}

/// Second fundamental matrices and Gauss-map invariants at `frame`.
///
/// Returns the unrestricted `n × n` matrices (one per normal direction, in the
/// parameter basis `frame.param_basis`) together with the full analysis.
pub fn second_fundamental(
    chart: &Chart,
    frame: &TangentFrame,
    policy: &RankPolicy,
) -> Result<(Vec<DMatrix<f64>>, GaussAnalysis)> {
    let jet = chart.jet(&frame.param_point)?;
    let n = frame.dim();
    let w = &frame.param_basis;

    let forms: Vec<DMatrix<f64>> = frame
        .normal_basis
        .column_iter()
        .map(|nu| {
            let nu: Vec<f64> = nu.iter().map(|v| v / frame.scale).collect();
            let m = w.transpose() * jet.contract_hessians(&nu) * w;
            (&m + m.transpose()) * 0.5
        })
        .collect();

    let mut stacked = DMatrix::zeros(forms.len() * n, n);
    for (a, m) in forms.iter().enumerate() {
        stacked.view_mut((a * n, 0), (n, n)).copy_from(m);
    }
    let decision = numerical_rank_with(&stacked, policy)?;
    if decision.ambiguous {
        return Err(non_generic(
            format!("{}: leaf kernel", chart.name()),
            vec![frame.decision.clone(), decision],
        ));
    }
    let r = decision.rank;
    let kernel = nullspace_with_rank(&stacked, r);
    let transversal = orthogonal_complement(&kernel);
    let b = forms
        .iter()
        .map(|m| {
            let br = transversal.transpose() * m * &transversal;
            (&br + br.transpose()) * 0.5
        })
        .collect();

    let analysis = GaussAnalysis {
        frame: frame.clone(),
        n,
        r,
        l: n - r,
        sff: SecondFundamentalSystem {
            b,
            transversal_basis: w * &transversal,
            leaf_basis: w * &kernel,
        },
        rank_decisions: vec![frame.decision.clone(), decision],
    };
    Ok((forms, analysis))
}

/// Full analysis at a given parameter point.
pub fn analyze_at(chart: &Chart, u: &[f64], policy: &RankPolicy) -> Result<GaussAnalysis> {
    let frame = tangent_frame(chart, u, policy)?;
    Ok(second_fundamental(chart, &frame, policy)?.1)
}

/// Analysis at a random sample point, resampling on ambiguous decisions.
pub fn analyze<R: Rng + ?Sized>(
    chart: &Chart,
    rng: &mut R,
    config: &AnalysisConfig,
) -> Result<GaussAnalysis> {
    retry(config, chart.name(), |_| {
        let u = chart.sample_point(rng)?;
        analyze_at(chart, &u, &config.policy)
    })
}

/// Run `attempt` until it succeeds or `1 + max_retries` ambiguous failures
/// accumulate. Other errors propagate immediately.
pub fn retry<T>(
    config: &AnalysisConfig,
    context: &str,
    mut attempt: impl FnMut(usize) -> Result<T>,
) -> Result<T> {
    let mut audit = Vec::new();
    let mut last = None;
    for k in 0..=config.max_retries {
        match attempt(k) {
            Ok(v) => return Ok(v),
            Err(e) if e.is_ambiguity() => {
                if let Error::NonGeneric { audit: a, .. } = &e {
                    audit.extend(a.iter().cloned());
                }
                last = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    let detail = last.map(|e| e.to_string()).unwrap_or_default();
    Err(Error::NonGeneric {
        context: format!("{context}: {detail}"),
        attempts: config.max_retries + 1,
        audit,
    })
}
