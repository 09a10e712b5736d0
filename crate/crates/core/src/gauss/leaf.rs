//! Leaf operators and foci of ruled charts.
//!
//! Along a leaf the tangent space is fixed, so the base-direction derivatives
//! `∂_q x`, taken modulo the leaf span `L`, stay in the fixed `r`-dimensional
//! quotient `T / L`. Writing them in the basis given by their values at the
//! base point yields the Jacobi matrix `J(s) = I + Σ_a s^a C_a`, exactly affine
//! because the chart is affine in the leaf parameters. Its determinant is a
//! polynomial of degree at most `r` whose roots are the focal points.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{tangent_frame, GaussAnalysis};
use crate::catalogue::{Chart, RuledChart};
use crate::error::{Error, Result};
use crate::numerics::rank::{canonical_direction, orthonormalize};
use crate::numerics::poly::ZERO_POLY_FLOOR;
use crate::numerics::rank::{numerical_rank_with, singular_values, RankPolicy};
use crate::numerics::{chebyshev_nodes, poly_from_samples, real_roots, Poly1, Root, RootOptions};

pub const DEFAULT_SCAN_POINTS: usize = 200;

/// Operators `C_a` of the Jacobi matrix together with the second fundamental
/// matrices written in the same base-parameter coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct LeafOperators {
    /// One `r × r` matrix per leaf parameter; `J(s) = I + Σ s^a C_a`.
    pub c: Vec<DMatrix<f64>>,
    /// `B^α_{pq} = ⟨ν_α, ∂_p ∂_q x⟩` over base parameters `p, q`.
    pub b: Vec<DMatrix<f64>>,
    pub base_point: Vec<f64>,
}

impl LeafOperators {
    /// `max_{α,a} ‖B^α C_a − (B^α C_a)ᵀ‖ / (‖B^α‖ ‖C_a‖)`, or 0 when every
    /// product is zero.
    pub fn max_relative_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for b in &self.b {
            for c in &self.c {
                let denom = b.norm() * c.norm();
                if denom == 0.0 {
                    continue;
                }
                let h = b * c;
                worst = worst.max((&h - h.transpose()).norm() / denom);
            }
        }
        worst
    }
}

/// A line inside the leaf through the analysis point, given as a direction in
/// leaf-parameter coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeafLine {
    pub direction: Vec<f64>,
}

struct JacobiFrame {
    /// Orthonormal basis of `T / L` (as a subspace orthogonal to `L`).
    q: DMatrix<f64>,
    e0_inv: DMatrix<f64>,
    scale: f64,
}

fn base_derivatives(jet_jac: &DMatrix<f64>, base: usize, scale: f64) -> DMatrix<f64> {
    jet_jac.columns(0, base) / scale
}

fn jacobi_frame(chart: &RuledChart, p: &[f64], policy: &RankPolicy) -> Result<JacobiFrame> {
    let jet = chart.jet(p)?;
    let (point, scale) = canonical_direction(&jet.value);
    let base = chart.base_count();
    let leaf = chart.leaf_count();

    let mut leaf_cols = vec![point];
    for a in 0..leaf {
        leaf_cols.push(jet.jacobian.column(base + a) / scale);
    }
    let leaf_span = DMatrix::from_columns(&leaf_cols);
    let leaf_rank = numerical_rank_with(&leaf_span, policy)?;
    if leaf_rank.rank != leaf + 1 || leaf_rank.ambiguous {
        return Err(Error::precondition(format!(
            "{}: leaf parameters do not span a {leaf}-plane at {p:?}",
            chart.name()
        )));
    }
    let l_basis = orthonormalize(&leaf_span);

    let db = base_derivatives(&jet.jacobian, base, scale);
    let projected = &db - &l_basis * (l_basis.transpose() * &db);
    // Compare against the unprojected derivatives: a relative rank test on
    // `projected` alone cannot see it vanish as a whole.
    let reference = singular_values(&db).first().copied().unwrap_or(0.0);
    let sv = singular_values(&projected);
    let smallest = if sv.len() < base { 0.0 } else { sv[base - 1] };
    if base > 0 && !(smallest > policy.tol * reference * policy.confidence_ratio) {
        return Err(Error::SingularBasePoint);
    }
    let q = orthonormalize(&projected);
    let e0 = q.transpose() * &projected;
    let e0_inv = e0.try_inverse().ok_or(Error::SingularBasePoint)?;
    Ok(JacobiFrame { q, e0_inv, scale })
}

/// Leaf operators `C_a` at the analysis point of a ruled chart.
pub fn leaf_operators(
    chart: &RuledChart,
    analysis: &GaussAnalysis,
    policy: &RankPolicy,
) -> Result<LeafOperators> {
    let base = chart.base_count();
    if analysis.r != base {
        return Err(Error::precondition(format!(
            "{}: {} base parameters but measured rank {}",
            chart.name(),
            base,
            analysis.r
        )));
    }
    let p = &analysis.frame.param_point;
    let frame = jacobi_frame(chart, p, policy)?;
    let jet = chart.jet(p)?;

    let c = (0..chart.leaf_count())
        .map(|a| {
            let mixed = DMatrix::from_fn(jet.coords(), base, |k, q| {
                jet.hessians[k][(q, base + a)] / frame.scale
            });
            &frame.e0_inv * (frame.q.transpose() * mixed)
        })
        .collect();

    let b = analysis
        .frame
        .normal_basis
        .column_iter()
        .map(|nu| {
            let nu: Vec<f64> = nu.iter().map(|v| v / frame.scale).collect();
            let full = jet.contract_hessians(&nu);
            full.view((0, 0), (base, base)).into_owned()
        })
        .collect();

    Ok(LeafOperators {
        c,
        b,
        base_point: p.clone(),
    })
}

/// Determinant of the Jacobi matrix along a leaf line, as a polynomial in the
/// line parameter `σ` (the line is `p + σ·(0, direction)`).
#[derive(Clone, Debug, Serialize)]
pub struct FocusPolynomial {
    pub poly: Poly1,
    pub interval: (f64, f64),
    pub nodes: Vec<f64>,
    pub samples: Vec<f64>,
    /// `max(1, max |sample|)`; `det J` is 1 at the base point.
    pub scale: f64,
}

impl FocusPolynomial {
    pub fn roots(&self) -> Result<Vec<Root>> {
        real_roots(
            &self.poly,
            self.interval,
            &RootOptions {
                zero_floor: ZERO_POLY_FLOOR * self.scale,
                ..RootOptions::default()
            },
        )
    }
}

fn line_point(p: &[f64], base: usize, direction: &[f64], sigma: f64) -> Vec<f64> {
    let mut out = p.to_vec();
    for (a, d) in direction.iter().enumerate() {
        out[base + a] += sigma * d;
    }
    out
}

/// Interpolate `det J(σ)` from `r + 1` Chebyshev samples on `interval`.
pub fn focus_polynomial(
    chart: &RuledChart,
    analysis: &GaussAnalysis,
    line: &LeafLine,
    interval: (f64, f64),
    policy: &RankPolicy,
) -> Result<FocusPolynomial> {
    let base = chart.base_count();
    if line.direction.len() != chart.leaf_count() {
        return Err(Error::invalid(format!(
            "leaf direction needs {} components",
            chart.leaf_count()
        )));
    }
    if line.direction.iter().all(|d| *d == 0.0) {
        return Err(Error::invalid("leaf direction is zero"));
    }
    if !(interval.0 < interval.1) {
        return Err(Error::invalid("empty probe interval"));
    }
    let p = &analysis.frame.param_point;
    let frame = jacobi_frame(chart, p, policy)?;
    let degree = analysis.r;
    let nodes = chebyshev_nodes(degree + 1, interval.0, interval.1);
    let samples = nodes
        .iter()
        .map(|&sigma| {
            let jet = chart.jet(&line_point(p, base, &line.direction, sigma))?;
            let db = base_derivatives(&jet.jacobian, base, frame.scale);
            let j = &frame.e0_inv * (frame.q.transpose() * db);
            Ok(j.determinant())
        })
        .collect::<Result<Vec<f64>>>()?;
    let poly = poly_from_samples(&nodes, &samples, degree)?;
    let scale = samples.iter().fold(1.0f64, |m, s| m.max(s.abs()));
    if poly.max_abs_coefficient() < ZERO_POLY_FLOOR * scale {
        return Err(Error::DegenerateLeaf);
    }
    Ok(FocusPolynomial {
        poly,
        interval,
        nodes,
        samples,
        scale,
    })
}

/// Relative size of the `(n + 1)`-th singular value of the homogeneous
/// tangent-span matrix; zero exactly where the tangent space drops dimension.
fn drop_measure(chart: &Chart, u: &[f64], n: usize) -> Result<f64> {
    let jet = chart.jet(u)?;
    let s = jet.span_rows() / jet.value.norm();
    let sv = singular_values(&s);
    Ok(match sv.get(n) {
        Some(v) => v / sv[0],
        None => 0.0,
    })
}

/// Locate parameters on `base + σ·direction`, `σ ∈ interval`, where the
/// chart's tangent space drops rank, by a grid scan of the drop measure
/// followed by golden-section refinement of each local minimum.
pub fn rank_drop_scan(
    chart: &Chart,
    base: &[f64],
    direction: &[f64],
    interval: (f64, f64),
    points: usize,
    policy: &RankPolicy,
) -> Result<Vec<f64>> {
    if direction.len() != chart.param_dim() {
        return Err(Error::invalid("scan direction has wrong dimension"));
    }
    if points < 3 || !(interval.0 < interval.1) {
        return Err(Error::invalid("scan needs ≥ 3 points on a non-empty interval"));
    }
    let n = tangent_frame(chart, base, policy)?.dim();
    let at = |sigma: f64| -> Result<f64> {
        let u: Vec<f64> = base
            .iter()
            .zip(direction)
            .map(|(b, d)| b + sigma * d)
            .collect();
        drop_measure(chart, &u, n)
    };
    let step = (interval.1 - interval.0) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points).map(|k| interval.0 + k as f64 * step).collect();
    let values = grid.iter().map(|&s| at(s)).collect::<Result<Vec<f64>>>()?;

    let mut found: Vec<f64> = Vec::new();
    for k in 1..points - 1 {
        if !(values[k] <= values[k - 1] && values[k] <= values[k + 1]) {
            continue;
        }
        let (sigma, value) = golden_min(&at, grid[k - 1], grid[k + 1])?;
        if value <= policy.tol && found.last().is_none_or(|&f| sigma - f > 1e-6) {
            found.push(sigma);
        }
    }
    Ok(found)
}

fn golden_min(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > 1e-13 * (1.0 + a.abs().max(b.abs())) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::{make_curve_chart, make_torse, CurveKind};
    use crate::gauss::analyze_at;

    #[test]
    fn jacobi_matrix_is_identity_at_base() {
        let tc = make_curve_chart(CurveKind::TwistedCubic, 3).unwrap();
        let t = make_torse(&tc, 1).unwrap();
        let policy = RankPolicy::default();
        let a = analyze_at(&t, &[0.3, 0.8], &policy).unwrap();
        let fp = focus_polynomial(&t, &a, &LeafLine { direction: vec![1.0] }, (-2.0, 2.0), &policy)
            .unwrap();
        assert!((fp.poly.eval(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn torse_focus_is_the_curve_point() {
        // x = γ + s γ': the generator touches the curve at s = 0, i.e. σ = −s₀.
        let tc = make_curve_chart(CurveKind::TwistedCubic, 3).unwrap();
        let t = make_torse(&tc, 1).unwrap();
        let policy = RankPolicy::default();
        let a = analyze_at(&t, &[0.3, 0.8], &policy).unwrap();
        let ops = leaf_operators(&t, &a, &policy).unwrap();
        assert_eq!(ops.c.len(), 1);
        assert!(ops.c[0][(0, 0)].abs() > 0.1);
        let fp = focus_polynomial(&t, &a, &LeafLine { direction: vec![1.0] }, (-2.0, 2.0), &policy)
            .unwrap();
        let roots = fp.roots().unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].location + 0.8).abs() < 1e-10);
        // root of det(I + σ C) equals −1/C
        assert!((roots[0].location + 1.0 / ops.c[0][(0, 0)]).abs() < 1e-10);
    }

    #[test]
    fn base_point_on_focus_is_rejected() {
        let tc = make_curve_chart(CurveKind::TwistedCubic, 3).unwrap();
        let t = make_torse(&tc, 1).unwrap();
        let policy = RankPolicy::default();
        // s = 0 lies on the edge of regression; the tangent plane collapses there.
        let a = analyze_at(&t, &[0.3, 0.8], &policy).unwrap();
        let mut at_focus = a.clone();
        at_focus.frame.param_point = vec![0.3, 0.0];
        assert!(matches!(
            leaf_operators(&t, &at_focus, &policy),
            Err(Error::SingularBasePoint)
        ));
    }

    #[test]
    fn scan_finds_torse_contact_point() {
        let tc = make_curve_chart(CurveKind::TwistedCubic, 3).unwrap();
        let t = make_torse(&tc, 1).unwrap();
        let policy = RankPolicy::default();
        let drops = rank_drop_scan(&t, &[0.3, 0.8], &[0.0, 1.0], (-2.0, 2.0), 200, &policy).unwrap();
        assert_eq!(drops.len(), 1);
        assert!((drops[0] + 0.8).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_lines() {
        let tc = make_curve_chart(CurveKind::TwistedCubic, 3).unwrap();
        let t = make_torse(&tc, 1).unwrap();
        let policy = RankPolicy::default();
        let a = analyze_at(&t, &[0.3, 0.8], &policy).unwrap();
        let zero = LeafLine { direction: vec![0.0] };
        assert!(focus_polynomial(&t, &a, &zero, (-1.0, 1.0), &policy).is_err());
        let wrong = LeafLine { direction: vec![1.0, 0.0] };
        assert!(focus_polynomial(&t, &a, &wrong, (-1.0, 1.0), &policy).is_err());
    }
}
