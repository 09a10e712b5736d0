//! Run configuration, report assembly and rendering for the command line.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalogue::{resolve, RuledChart, TableEntry, TABLE};
use crate::duality::{
    refined_dual_defect, DualityConfig, DualityReport, GhMode, DEFAULT_SAMPLES, GH_REL_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::gauss::{
    analyze_at, focus_polynomial, leaf_operators, rank_drop_scan, AnalysisConfig, LeafLine,
    DEFAULT_SCAN_POINTS,
};
use crate::numerics::{RankDecision, RankPolicy, Root, DEFAULT_RANK_TOL};

pub const DEFAULT_SEED: u64 = 42;
/// Upper bound (exclusive) accepted for the rank tolerance.
pub const MAX_RANK_TOL: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
    Csv,
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Ok,
    BadSpec,
    Ambiguous,
    Inconsistent,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Ok => 0,
            ExitStatus::BadSpec => 2,
            ExitStatus::Ambiguous => 3,
            ExitStatus::Inconsistent => 4,
        }
    }

    fn of_error(e: &Error) -> ExitStatus {
        if e.is_ambiguity() {
            ExitStatus::Ambiguous
        } else {
            ExitStatus::BadSpec
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub spec: String,
    pub seed: u64,
    pub rank_tol: f64,
    pub gh_mode: GhMode,
    pub samples: usize,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spec: String::new(),
            seed: DEFAULT_SEED,
            rank_tol: DEFAULT_RANK_TOL,
            gh_mode: GhMode::Auto,
            samples: DEFAULT_SAMPLES,
            parallel: true,
        }
    }
}

impl RunConfig {
    pub fn for_spec(spec: impl Into<String>) -> Self {
        RunConfig {
            spec: spec.into(),
            ..RunConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rank_tol > 0.0 && self.rank_tol < MAX_RANK_TOL) {
            return Err(Error::invalid(format!(
                "rank tolerance must lie in (0, {MAX_RANK_TOL:e}), got {}",
                self.rank_tol
            )));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        Ok(())
    }

    pub fn duality(&self) -> DualityConfig {
        DualityConfig {
            seed: self.seed,
            analysis: AnalysisConfig::with_tol(self.rank_tol),
            samples: self.samples,
            gh_mode: self.gh_mode,
            parallel: self.parallel,
        }
    }

    fn tolerances(&self) -> Tolerances {
        let policy = self.duality().analysis.policy;
        Tolerances {
            rank_tol: policy.tol,
            confidence_ratio: policy.confidence_ratio,
            gh_rel_threshold: GH_REL_THRESHOLD,
            samples: self.samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub rank_tol: f64,
    pub confidence_ratio: f64,
    pub gh_rel_threshold: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GhSummary {
    pub mode: GhMode,
    /// `all_singular` or `exists_nonsingular`.
    pub verdict: &'static str,
    pub max_abs_det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConsistencySummary {
    pub theorem1: bool,
    pub theorem4: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub spec: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub n: usize,
    pub r: usize,
    pub l: usize,
    pub n_star: usize,
    pub l_star: usize,
    pub r_star: usize,
    pub delta_star: i64,
    pub expected_n_star: usize,
    pub gh: GhSummary,
    pub consistency: ConsistencySummary,
    pub audit: Vec<RankDecision>,
}

impl AnalyzeReport {
    fn new(config: &RunConfig, d: DualityReport) -> Self {
        AnalyzeReport {
            spec: config.spec.clone(),
            seed: config.seed,
            tolerances: config.tolerances(),
            big_n: d.big_n,
            n: d.n,
            r: d.r,
            l: d.l,
            n_star: d.n_star,
            l_star: d.l_star,
            r_star: d.r_star,
            delta_star: d.delta_star,
            expected_n_star: d.expected_n_star,
            gh: GhSummary {
                mode: d.gh.mode,
                verdict: if d.gh.all_singular {
                    "all_singular"
                } else {
                    "exists_nonsingular"
                },
                max_abs_det: d.gh.max_abs_det,
            },
            consistency: ConsistencySummary {
                theorem1: d.consistency.theorem1,
                theorem4: d.consistency.theorem4,
            },
            audit: d.audit,
        }
    }
}

/// What is known when an analysis cannot finish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureReport {
    pub spec: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub status: ExitStatus,
    pub error: String,
    pub audit: Vec<RankDecision>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnalyzeOutcome {
    Report(AnalyzeReport),
    Failed(FailureReport),
}

impl AnalyzeOutcome {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            AnalyzeOutcome::Report(r) => {
                if r.consistency.theorem1 && r.consistency.theorem4 && r.delta_star >= 0 {
                    ExitStatus::Ok
                } else {
                    ExitStatus::Inconsistent
                }
            }
            AnalyzeOutcome::Failed(f) => f.status,
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            AnalyzeOutcome::Report(r) => to_json(r),
            AnalyzeOutcome::Failed(f) => to_json(f),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            AnalyzeOutcome::Report(r) => {
                let mut s = String::new();
                let _ = writeln!(s, "variety   {}", r.spec);
                let _ = writeln!(s, "seed      {}", r.seed);
                let _ = writeln!(s, "N n r l   {} {} {} {}", r.big_n, r.n, r.r, r.l);
                let _ = writeln!(s, "n* l* r*  {} {} {}", r.n_star, r.l_star, r.r_star);
                let _ = writeln!(
                    s,
                    "delta*    {} (expected dim X* = {})",
                    r.delta_star, r.expected_n_star
                );
                let _ = writeln!(
                    s,
                    "pencil    {} via {} (max |det| {:.3e})",
                    r.gh.verdict, r.gh.mode, r.gh.max_abs_det
                );
                let _ = writeln!(
                    s,
                    "checks    theorem1={} theorem4={}",
                    r.consistency.theorem1, r.consistency.theorem4
                );
                s
            }
            AnalyzeOutcome::Failed(f) => {
                format!("variety   {}\nstatus    {:?}\nerror     {}\n", f.spec, f.status, f.error)
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}

pub fn cmd_analyze(config: &RunConfig) -> AnalyzeOutcome {
    let result = config
        .validate()
        .and_then(|_| resolve(&config.spec))
        .and_then(|chart| refined_dual_defect(&chart, &config.duality()));
    match result {
        Ok(d) => AnalyzeOutcome::Report(AnalyzeReport::new(config, d)),
        Err(e) => AnalyzeOutcome::Failed(FailureReport {
            spec: config.spec.clone(),
            seed: config.seed,
            tolerances: config.tolerances(),
            status: ExitStatus::of_error(&e),
            audit: match &e {
                Error::NonGeneric { audit, .. } => audit.clone(),
                _ => Vec::new(),
            },
            error: e.to_string(),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Ambiguous,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedRow {
    pub n: usize,
    pub l: usize,
    pub r: usize,
    pub l_star: usize,
    pub n_star: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub example_id: usize,
    pub name: &'static str,
    pub spec: &'static str,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub n: Option<usize>,
    pub l: Option<usize>,
    pub r: Option<usize>,
    pub l_star: Option<usize>,
    pub n_star: Option<usize>,
    pub delta_star: Option<i64>,
    pub gh_all_singular: Option<bool>,
    pub dual_name: Option<&'static str>,
    pub expected: ExpectedRow,
    pub status: RowStatus,
    pub error: Option<String>,
}

fn table_row(entry: &TableEntry, config: &RunConfig) -> TableRow {
    let expected = ExpectedRow {
        n: entry.n,
        l: entry.l,
        r: entry.r,
        l_star: entry.l_star,
        n_star: entry.n_star,
    };
    let mut row = TableRow {
        example_id: entry.example_id,
        name: entry.name,
        spec: entry.spec,
        big_n: entry.ambient,
        n: None,
        l: None,
        r: None,
        l_star: None,
        n_star: None,
        delta_star: None,
        gh_all_singular: None,
        dual_name: entry.dual_name,
        expected,
        status: RowStatus::Fail,
        error: None,
    };
    let result = resolve(entry.spec).and_then(|c| refined_dual_defect(&c, &config.duality()));
    match result {
        Ok(d) => {
            let measured = ExpectedRow {
                n: d.n,
                l: d.l,
                r: d.r,
                l_star: d.l_star,
                n_star: d.n_star,
            };
            row.n = Some(d.n);
            row.l = Some(d.l);
            row.r = Some(d.r);
            row.l_star = Some(d.l_star);
            row.n_star = Some(d.n_star);
            row.delta_star = Some(d.delta_star);
            row.gh_all_singular = Some(d.gh.all_singular);
            row.status = if measured == expected && d.big_n == entry.ambient && d.consistent() {
                RowStatus::Ok
            } else {
                RowStatus::Fail
            };
        }
        Err(e) => {
            row.status = if e.is_ambiguity() {
                RowStatus::Ambiguous
            } else {
                RowStatus::Fail
            };
            row.error = Some(e.to_string());
        }
    }
    row
}

/// Measure every table row; rows are returned in example order.
pub fn cmd_table(config: &RunConfig) -> Result<Vec<TableRow>> {
    config.validate()?;
    Ok(if config.parallel {
        TABLE.par_iter().map(|e| table_row(e, config)).collect()
    } else {
        TABLE.iter().map(|e| table_row(e, config)).collect()
    })
}

pub fn table_exit_status(rows: &[TableRow]) -> ExitStatus {
    if rows.iter().any(|r| r.status == RowStatus::Fail) {
        ExitStatus::Inconsistent
    } else if rows.iter().any(|r| r.status == RowStatus::Ambiguous) {
        ExitStatus::Ambiguous
    } else {
        ExitStatus::Ok
    }
}

pub fn table_json(rows: &[TableRow]) -> String {
    to_json(&rows)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Columns follow the dimension table, then identification and verdicts.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "X", "N", "n", "l", "r", "l*", "n*", "X*", "example_id", "spec", "delta_star",
        "gh_all_singular", "status",
    ];
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.name.to_string(),
            r.big_n.to_string(),
            opt(r.n),
            opt(r.l),
            opt(r.r),
            opt(r.l_star),
            opt(r.n_star),
            r.dual_name.unwrap_or("").to_string(),
            r.example_id.to_string(),
            r.spec.to_string(),
            opt(r.delta_star),
            opt(r.gh_all_singular),
            format!("{:?}", r.status).to_lowercase(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[derive(Clone, Debug, PartialEq)]
pub struct FociRequest {
    pub spec: String,
    pub at: Vec<f64>,
    pub dir: Vec<f64>,
    pub interval: (f64, f64),
    pub rank_tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FociStatus {
    Ok,
    DegenerateLeaf,
    SingularBasePoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FociReport {
    pub spec: String,
    pub at: Vec<f64>,
    pub dir: Vec<f64>,
    pub interval: (f64, f64),
    pub status: FociStatus,
    /// Ascending coefficients of `det J(σ)`.
    pub coefficients: Vec<f64>,
    pub roots: Vec<Root>,
    /// Parameters where the tangent space drops rank along the same line.
    pub scan: Vec<f64>,
    /// Largest distance from a root to its nearest scan location.
    pub max_root_scan_gap: Option<f64>,
    pub symmetry_defect: Option<f64>,
}

impl FociReport {
    pub fn exit_status(&self) -> ExitStatus {
        match self.status {
            FociStatus::Ok | FociStatus::DegenerateLeaf => ExitStatus::Ok,
            FociStatus::SingularBasePoint => ExitStatus::Ambiguous,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "variety   {}", self.spec);
        let _ = writeln!(s, "status    {:?}", self.status);
        let _ = writeln!(s, "det J     {:?}", self.coefficients);
        for r in &self.roots {
            let _ = writeln!(s, "root      {:.12} (multiplicity {})", r.location, r.multiplicity);
        }
        let _ = writeln!(s, "scan      {:?}", self.scan);
        s
    }
}

/// Foci along the leaf line through `at` with leaf direction `dir`.
pub fn cmd_foci(req: &FociRequest) -> Result<FociReport> {
    let chart = resolve(&req.spec)?;
    let ruled = RuledChart::try_from(chart.clone())?;
    let policy = RankPolicy {
        tol: req.rank_tol,
        ..RankPolicy::default()
    };
    let analysis = analyze_at(&chart, &req.at, &policy)?;
    let line = LeafLine {
        direction: req.dir.clone(),
    };
    let mut report = FociReport {
        spec: req.spec.clone(),
        at: req.at.clone(),
        dir: req.dir.clone(),
        interval: req.interval,
        status: FociStatus::Ok,
        coefficients: Vec::new(),
        roots: Vec::new(),
        scan: Vec::new(),
        max_root_scan_gap: None,
        symmetry_defect: None,
    };
    let poly = match focus_polynomial(&ruled, &analysis, &line, req.interval, &policy) {
        Ok(p) => p,
        Err(Error::DegenerateLeaf) => {
            report.status = FociStatus::DegenerateLeaf;
            return Ok(report);
        }
        Err(Error::SingularBasePoint) => {
            report.status = FociStatus::SingularBasePoint;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.coefficients = poly.poly.coefficients.clone();
    report.roots = poly.roots()?;
    report.symmetry_defect =
        Some(leaf_operators(&ruled, &analysis, &policy)?.max_relative_asymmetry());

    let mut full_dir = vec![0.0; chart.param_dim()];
    full_dir[ruled.base_count()..].copy_from_slice(&req.dir);
    report.scan = rank_drop_scan(
        &chart,
        &req.at,
        &full_dir,
        req.interval,
        DEFAULT_SCAN_POINTS,
        &policy,
    )?;
    report.max_root_scan_gap = report
        .roots
        .iter()
        .map(|root| {
            report
                .scan
                .iter()
                .map(|s| (s - root.location).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(f64::max);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let mut c = RunConfig::for_spec("twisted_cubic");
        assert!(c.validate().is_ok());
        c.rank_tol = 0.5;
        assert!(c.validate().is_err());
        c.rank_tol = 1e-8;
        c.samples = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn unknown_spec_exits_with_two() {
        let out = cmd_analyze(&RunConfig::for_spec("klein_bottle"));
        assert_eq!(out.exit_status().code(), 2);
        assert!(out.to_json().contains("klein_bottle"));
    }

    #[test]
    fn veronese_report() {
        let out = cmd_analyze(&RunConfig::for_spec("veronese"));
        let AnalyzeOutcome::Report(r) = &out else {
            panic!("{out:?}")
        };
        assert_eq!((r.n, r.r, r.l, r.n_star), (2, 2, 0, 4));
        assert_eq!(out.exit_status(), ExitStatus::Ok);
    }

    #[test]
    fn foci_on_cone_hits_vertex() {
        let req = FociRequest {
            spec: "cone:conic,l=1,N=4".into(),
            at: vec![0.3, 0.2],
            dir: vec![1.0],
            interval: (-5.0, 5.0),
            rank_tol: 1e-8,
        };
        let rep = cmd_foci(&req).unwrap();
        assert_eq!(rep.roots.len(), 1);
        assert!((rep.roots[0].location - 0.8).abs() < 1e-10);
        assert!(rep.max_root_scan_gap.unwrap() < 1e-6);
    }
}
