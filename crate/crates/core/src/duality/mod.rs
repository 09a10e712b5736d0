//! Dual varieties: dimension of the variety of tangent hyperplanes, the
//! refined dual defect and its cross-check against the pencil of second
//! fundamental forms.

mod chart;
mod gh;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use chart::{dual_chart, DualChart};
pub use gh::{
    gh_singularity_test, interpolation_applicable, monomial_exponents, GhMode, GhOutcome,
    GH_INCONCLUSIVE_BAND, GH_INTERPOLATION_LIMIT, GH_PROBES, GH_REL_THRESHOLD,
};

use crate::catalogue::Chart;
use crate::error::{Error, Result};
use crate::gauss::{analyze_at, retry, AnalysisConfig, GaussAnalysis};
use crate::numerics::{numerical_rank_with, RankDecision};
use crate::rng::stream;

pub const DEFAULT_SAMPLES: usize = 5;

/// Stream indices are `sample + offset`, one family per use.
const SAMPLE_STREAM: u64 = 0;
const GH_STREAM: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualityConfig {
    pub seed: u64,
    pub analysis: AnalysisConfig,
    pub samples: usize,
    pub gh_mode: GhMode,
    pub parallel: bool,
}

impl Default for DualityConfig {
    fn default() -> Self {
        DualityConfig {
            seed: 42,
            analysis: AnalysisConfig::default(),
            samples: DEFAULT_SAMPLES,
            gh_mode: GhMode::Auto,
            parallel: true,
        }
    }
}

impl DualityConfig {
    pub fn with_seed(seed: u64) -> Self {
        DualityConfig {
            seed,
            ..DualityConfig::default()
        }
    }
}

/// Primal and dual analyses at one generic sample.
#[derive(Clone, Debug)]
pub struct DualSample {
    pub primal: GaussAnalysis,
    pub dual: GaussAnalysis,
    pub gh: GhOutcome,
}

fn measure_sample(chart: &Chart, index: usize, config: &DualityConfig) -> Result<DualSample> {
    let mut rng = stream(config.seed, SAMPLE_STREAM + index as u64);
    let mut gh_rng = stream(config.seed, GH_STREAM + index as u64);
    let policy = &config.analysis.policy;
    retry(&config.analysis, chart.name(), |_| {
        let u = chart.sample_point(&mut rng)?;
        let primal = analyze_at(chart, &u, policy)?;
        let dual = dual_chart(chart, &primal)?;
        let t: Vec<f64> = (0..dual.fiber_count)
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        let dual_analysis = analyze_at(&dual.chart, &dual.point(&t), policy)?;
        let gh = gh_singularity_test(&primal.sff, config.gh_mode, &mut gh_rng)?;
        Ok(DualSample {
            primal,
            dual: dual_analysis,
            gh,
        })
    })
}

/// Analyse `config.samples` independent points; results are in sample order
/// whether or not they were computed in parallel.
pub fn dual_samples(chart: &Chart, config: &DualityConfig) -> Result<Vec<DualSample>> {
    if config.samples == 0 {
        return Err(Error::invalid("at least one sample is required"));
    }
    let run = |i: usize| measure_sample(chart, i, config);
    let results: Vec<Result<DualSample>> = if config.parallel {
        (0..config.samples).into_par_iter().map(run).collect()
    } else {
        (0..config.samples).map(run).collect()
    };
    results.into_iter().collect()
}

fn median(mut values: Vec<usize>) -> usize {
    values.sort_unstable();
    values[(values.len() - 1) / 2]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DualDimension {
    pub n_star: usize,
    pub l_star: usize,
    pub r_star: usize,
}

fn dual_dimension_of(samples: &[DualSample]) -> DualDimension {
    DualDimension {
        n_star: median(samples.iter().map(|s| s.dual.n).collect()),
        l_star: median(samples.iter().map(|s| s.dual.l).collect()),
        r_star: median(samples.iter().map(|s| s.dual.r).collect()),
    }
}

/// `(n*, l*, r*)` of the dual variety, each the median over the samples.
pub fn dual_dimension(chart: &Chart, config: &DualityConfig) -> Result<DualDimension> {
    Ok(dual_dimension_of(&dual_samples(chart, config)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Consistency {
    /// For dually nondegenerate varieties, `(n*, l*, r*) = (N − l − 1, N − n − 1, r)`;
    /// true when not applicable.
    pub theorem1: bool,
    /// `δ* > 0` exactly when every tangent hyperplane is singular.
    pub theorem4: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    #[serde(rename = "N")]
    pub big_n: usize,
    pub n: usize,
    pub r: usize,
    pub l: usize,
    pub n_star: usize,
    pub l_star: usize,
    pub r_star: usize,
    pub expected_n_star: usize,
    /// Negative values signal a measurement above the expected dimension.
    pub delta_star: i64,
    pub gh: GhOutcome,
    pub consistency: Consistency,
    pub audit: Vec<RankDecision>,
}

impl DualityReport {
    pub fn consistent(&self) -> bool {
        self.consistency.theorem1 && self.consistency.theorem4 && self.delta_star >= 0
    }
}

/// Majority verdict over samples; `max_abs_det` is the largest among the
/// samples that agree with it.
fn combine_gh(samples: &[DualSample]) -> GhOutcome {
    let singular = samples.iter().filter(|s| s.gh.all_singular).count();
    let verdict = 2 * singular > samples.len();
    let agreeing = samples.iter().filter(|s| s.gh.all_singular == verdict);
    let mut out = agreeing
        .clone()
        .next()
        .expect("majority is non-empty")
        .gh
        .clone();
    out.max_abs_det = agreeing.clone().map(|s| s.gh.max_abs_det).fold(0.0, f64::max);
    out.max_abs_coefficient = agreeing
        .clone()
        .filter_map(|s| s.gh.max_abs_coefficient)
        .reduce(f64::max);
    out.threshold = agreeing.map(|s| s.gh.threshold).fold(f64::INFINITY, f64::min);
    out
}

/// Build the report from already measured samples.
pub fn report_from_samples(chart: &Chart, samples: &[DualSample]) -> DualityReport {
    let big_n = chart.ambient_dim();
    let n = median(samples.iter().map(|s| s.primal.n).collect());
    let r = median(samples.iter().map(|s| s.primal.r).collect());
    let l = n - r;
    let dim = dual_dimension_of(samples);
    let expected_n_star = big_n - l - 1;
    let delta_star = expected_n_star as i64 - dim.n_star as i64;
    let gh = combine_gh(samples);
    let theorem1 = delta_star != 0
        || (dim.n_star, dim.l_star, dim.r_star) == (big_n - l - 1, big_n - n - 1, r);
    let theorem4 = (delta_star > 0) == gh.all_singular;
    let audit = samples
        .iter()
        .flat_map(|s| {
            s.primal
                .rank_decisions
                .iter()
                .chain(&s.dual.rank_decisions)
                .cloned()
        })
        .collect();
    DualityReport {
        big_n,
        n,
        r,
        l,
        n_star: dim.n_star,
        l_star: dim.l_star,
        r_star: dim.r_star,
        expected_n_star,
        delta_star,
        gh,
        consistency: Consistency { theorem1, theorem4 },
        audit,
    }
}

/// `δ* = N − l − 1 − dim X*` together with the pencil test and consistency flags.
pub fn refined_dual_defect(chart: &Chart, config: &DualityConfig) -> Result<DualityReport> {
    let samples = dual_samples(chart, config)?;
    Ok(report_from_samples(chart, &samples))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Theorem4Record {
    pub delta_star: i64,
    pub all_singular: bool,
    pub max_abs_det: f64,
    pub consistent: bool,
}

/// Compare the measured defect with the pencil verdict.
pub fn verify_theorem4(chart: &Chart, config: &DualityConfig) -> Result<Theorem4Record> {
    let report = refined_dual_defect(chart, config)?;
    Ok(Theorem4Record {
        delta_star: report.delta_star,
        all_singular: report.gh.all_singular,
        max_abs_det: report.gh.max_abs_det,
        consistent: report.consistency.theorem4,
    })
}

/// Compose a chart with an invertible linear map of `P^N`, read as a
/// correlation sending points to hyperplanes.
pub fn apply_correlation(chart: &Chart, c: &DMatrix<f64>) -> Result<Chart> {
    let size = chart.ambient_dim() + 1;
    if c.shape() != (size, size) {
        return Err(Error::invalid(format!(
            "correlation must be {size} × {size}, got {} × {}",
            c.nrows(),
            c.ncols()
        )));
    }
    let decision = numerical_rank_with(c, &Default::default())?;
    if decision.rank < size {
        return Err(Error::SingularCorrelation {
            rank: decision.rank,
            expected: size,
        });
    }
    Ok(chart.transformed(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::{make_curve_chart, make_segre, CurveKind};

    #[test]
    fn twisted_cubic_dual_is_a_surface() {
        let c = make_curve_chart(CurveKind::TwistedCubic, 3).unwrap();
        let dim = dual_dimension(&c, &DualityConfig::default()).unwrap();
        assert_eq!(dim, DualDimension { n_star: 2, l_star: 1, r_star: 1 });
    }

    #[test]
    fn segre_defects() {
        let cfg = DualityConfig::default();
        let quadric = refined_dual_defect(&make_segre(1, 1).unwrap(), &cfg).unwrap();
        assert_eq!((quadric.n_star, quadric.delta_star), (2, 0));
        assert!(!quadric.gh.all_singular);
        let s12 = refined_dual_defect(&make_segre(1, 2).unwrap(), &cfg).unwrap();
        assert_eq!(s12.delta_star, 1);
        assert!(s12.gh.all_singular);
        assert!(s12.consistency.theorem4);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let c = make_segre(1, 2).unwrap();
        let mut cfg = DualityConfig::default();
        let a = refined_dual_defect(&c, &cfg).unwrap();
        cfg.parallel = false;
        let b = refined_dual_defect(&c, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn singular_correlation_is_rejected() {
        let c = make_curve_chart(CurveKind::TwistedCubic, 3).unwrap();
        let mut m = DMatrix::identity(4, 4);
        m[(3, 3)] = 0.0;
        assert!(matches!(
            apply_correlation(&c, &m),
            Err(Error::SingularCorrelation { rank: 3, expected: 4 })
        ));
        assert!(apply_correlation(&c, &DMatrix::identity(3, 3)).is_err());
    }
}
