//! Constructors for the example varieties: curves, torses, cones, joins,
//! Segre and Veronese varieties and the cubic symmetroid.

use nalgebra::DMatrix;

use super::chart::{Chart, ExpectedInvariants, Ruling, RuledChart};
use crate::error::{Error, Result};
use crate::numerics::{numerical_rank, Expr};
use crate::rng;

const TABULATED: &str = "tabulated";
const FORMULA: &str = "formula";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    TwistedCubic,
    /// Monomials `1, t, …, t^N`.
    RationalNormal,
    /// `(1, t, t²)` in a coordinate plane.
    Conic,
    /// Trigonometric polynomial curve with seeded random coefficients.
    Trig { seed: u64 },
}

/// Column-embedding of `k` raw coordinates as the first `k` of `N + 1`.
fn coordinate_embedding(coords: usize, raw: usize) -> DMatrix<f64> {
    DMatrix::from_fn(coords, raw, |i, j| if i == j { 1.0 } else { 0.0 })
}

fn monomial_curve(degree: usize) -> Vec<Expr> {
    (0..=degree).map(|k| Expr::var(0).pow(k as u32)).collect()
}

pub fn make_curve_chart(kind: CurveKind, ambient: usize) -> Result<Chart> {
    let (name, raw) = match kind {
        CurveKind::TwistedCubic => {
            if ambient < 3 {
                return Err(Error::invalid("twisted cubic needs N ≥ 3"));
            }
            ("twisted_cubic".to_string(), monomial_curve(3))
        }
        CurveKind::RationalNormal => {
            if ambient < 1 {
                return Err(Error::invalid("rational normal curve needs N ≥ 1"));
            }
            (format!("rnc{ambient}"), monomial_curve(ambient))
        }
        CurveKind::Conic => {
            if ambient < 2 {
                return Err(Error::invalid("conic needs N ≥ 2"));
            }
            ("conic".to_string(), monomial_curve(2))
        }
        CurveKind::Trig { seed } => (format!("trig{ambient}"), trig_components(ambient, seed)),
    };
    let raw_len = raw.len();
    let mut chart = Chart::from_exprs(name, raw, 1);
    if raw_len != ambient + 1 {
        chart = chart.transformed(&coordinate_embedding(ambient + 1, raw_len));
    }
    let expected = ExpectedInvariants::gauss(1, 1, TABULATED).nondegenerate_dual(ambient);
    Ok(chart.with_expected(expected))
}

fn trig_components(ambient: usize, seed: u64) -> Vec<Expr> {
    let harmonics = ambient / 2 + 1;
    let mut r = rng::stream(seed, 0);
    let coeffs = rng::gaussian_matrix(ambient + 1, 2 * harmonics + 1, &mut r);
    (0..=ambient)
        .map(|k| {
            let mut terms = vec![Expr::constant(
                coeffs[(k, 0)] + if k == 0 { 3.0 } else { 0.0 },
            )];
            for j in 1..=harmonics {
                let arg = Expr::constant(j as f64) * Expr::var(0);
                terms.push(Expr::constant(coeffs[(k, 2 * j - 1)]) * arg.clone().cos());
                terms.push(Expr::constant(coeffs[(k, 2 * j)]) * arg.sin());
            }
            Expr::sum(terms)
        })
        .collect()
}

/// Dimension of the linear span of the chart image, from seeded samples.
pub fn span_dimension(chart: &Chart, samples: usize) -> Result<usize> {
    let mut r = rng::stream(rng::stable_hash(chart.name()), 7);
    let mut cols = Vec::with_capacity(samples);
    for _ in 0..samples {
        let u = chart.sample_point(&mut r)?;
        let v = chart.value(&u)?;
        cols.push(v.clone() / v.norm());
    }
    let m = DMatrix::from_columns(&cols);
    Ok(numerical_rank(&m, 1e-8)?.rank)
}

fn expr_components(chart: &Chart) -> Result<Vec<Expr>> {
    chart
        .ambient_exprs()
        .ok_or_else(|| Error::invalid(format!("{} is not an expression chart", chart.name())))
}

/// Osculating `l`-planes of a curve: `γ(t) + Σ_a s^a γ^(a)(t)`.
pub fn make_torse(curve: &Chart, l: usize) -> Result<RuledChart> {
    if curve.param_dim() != 1 {
        return Err(Error::invalid("torse needs a one-parameter curve"));
    }
    let ambient = curve.ambient_dim();
    if l + 1 > ambient {
        return Err(Error::invalid(format!(
            "osculating order {l} too large for P^{ambient}"
        )));
    }
    let gamma = expr_components(curve)?;
    if l == 0 {
        return RuledChart::try_from(
            curve
                .clone()
                .with_ruling(Ruling { base: 1, leaf: 0 })
                .renamed(format!("torse:{},l=0", curve.name())),
        );
    }

    let mut derivs = vec![gamma.clone()];
    for k in 1..=l + 1 {
        let prev = &derivs[k - 1];
        derivs.push(prev.iter().map(|e| e.diff(0)).collect::<Vec<_>>());
    }

    // Osculating frame γ, γ', …, γ^(l+1) must be independent at probe points.
    for t in [-0.73, 0.11, 0.58] {
        let frame = DMatrix::from_fn(ambient + 1, l + 2, |c, k| derivs[k][c].eval(&[t]));
        let rank = numerical_rank(&frame, 1e-10)?.rank;
        if rank < l + 2 {
            return Err(Error::precondition(format!(
                "osculating frame of order {} degenerate at t = {t}",
                l + 1
            )));
        }
    }

    // Parameters: t, s¹..s^l. Curve expressions use variable 0 already.
    let components = (0..=ambient)
        .map(|c| {
            Expr::sum(
                std::iter::once(gamma[c].clone())
                    .chain((1..=l).map(|a| Expr::var(a) * derivs[a][c].clone())),
            )
        })
        .collect();
    let n = l + 1;
    let expected = ExpectedInvariants::gauss(n, 1, TABULATED).nondegenerate_dual(ambient);
    let chart = Chart::from_exprs(format!("torse:{},l={l}", curve.name()), components, l + 1)
        .with_ruling(Ruling { base: 1, leaf: l })
        .with_expected(expected);
    RuledChart::try_from(chart)
}

/// Cone with vertex spanned by the columns of `vertex` over a director chart:
/// `(1 − Σ s^a) y(u) + Σ_a s^a v_a`, base point `s = 0` on the director.
pub fn make_cone(base: &Chart, vertex: &DMatrix<f64>) -> Result<RuledChart> {
    let coords = base.ambient_dim() + 1;
    if vertex.nrows() != coords {
        return Err(Error::invalid(format!(
            "vertex has {} rows, ambient space has {coords} coordinates",
            vertex.nrows()
        )));
    }
    let k = vertex.ncols();
    let d = base.param_dim();
    if k == 0 {
        let mut chart = base.clone().with_ruling(Ruling { base: d, leaf: 0 });
        chart = chart.renamed(format!("cone:{}", base.name()));
        return RuledChart::try_from(chart);
    }
    let vertex_rank = numerical_rank(vertex, 1e-10)?.rank;
    if vertex_rank < k {
        return Err(Error::invalid("vertex columns are dependent"));
    }
    let base_span = span_dimension(base, 4 * (d + 2) + coords)?;
    let mut r = rng::stream(rng::stable_hash(base.name()), 11);
    let mut cols = Vec::new();
    for _ in 0..4 * (d + 2) + coords {
        let u = base.sample_point(&mut r)?;
        let v = base.value(&u)?;
        cols.push(v.clone() / v.norm());
    }
    for c in vertex.column_iter() {
        cols.push(c.into_owned() / c.norm());
    }
    let joint = numerical_rank(&DMatrix::from_columns(&cols), 1e-8)?.rank;
    if joint < base_span + k {
        return Err(Error::precondition(
            "vertex meets the linear span of the director variety",
        ));
    }

    let y = expr_components(base)?;
    let leaf_vars: Vec<Expr> = (0..k).map(|a| Expr::var(d + a)).collect();
    let weight = Expr::one() - Expr::sum(leaf_vars.iter().cloned());
    let components = (0..coords)
        .map(|c| {
            let vertex_part = Expr::sum(
                leaf_vars
                    .iter()
                    .enumerate()
                    .filter(|(a, _)| vertex[(c, *a)] != 0.0)
                    .map(|(a, s)| Expr::constant(vertex[(c, a)]) * s.clone()),
            );
            weight.clone() * y[c].clone() + vertex_part
        })
        .collect();
    let r_base = base.expected().and_then(|e| e.n).unwrap_or(d);
    let expected = ExpectedInvariants::gauss(r_base + k, r_base, FORMULA);
    let chart = Chart::from_exprs(format!("cone:{},l={k}", base.name()), components, d + k)
        .with_ruling(Ruling { base: d, leaf: k })
        .with_expected(expected);
    RuledChart::try_from(chart)
}

/// Lines meeting two curves: `(½ − s) γ₁(t₁) + (½ + s) γ₂(t₂)`.
///
/// The leaf parameter is centred so that `s = 0` is a regular point of the
/// generator; the curves are met at `s = ∓½`.
pub fn make_join(curve1: &Chart, curve2: &Chart) -> Result<RuledChart> {
    if curve1.param_dim() != 1 || curve2.param_dim() != 1 {
        return Err(Error::invalid("join needs two one-parameter curves"));
    }
    let ambient = curve1.ambient_dim();
    if curve2.ambient_dim() != ambient {
        return Err(Error::invalid("join curves live in different spaces"));
    }
    if ambient < 4 {
        return Err(Error::invalid("join needs N ≥ 4"));
    }
    let mut cols = Vec::new();
    for (idx, c) in [curve1, curve2].into_iter().enumerate() {
        let mut r = rng::stream(rng::stable_hash(c.name()), 13 + idx as u64);
        for _ in 0..(ambient + 4) {
            let u = c.sample_point(&mut r)?;
            let v = c.value(&u)?;
            cols.push(v.clone() / v.norm());
        }
    }
    let span = numerical_rank(&DMatrix::from_columns(&cols), 1e-8)?.rank;
    if span <= 4 {
        return Err(Error::precondition(
            "join curves lie in a common three-dimensional subspace",
        ));
    }

    let g1 = expr_components(curve1)?;
    let g2: Vec<Expr> = expr_components(curve2)?
        .iter()
        .map(|e| e.substitute(&[Expr::var(1)]))
        .collect();
    let s = Expr::var(2);
    let half = Expr::constant(0.5);
    let components = (0..=ambient)
        .map(|c| {
            (half.clone() - s.clone()) * g1[c].clone() + (half.clone() + s.clone()) * g2[c].clone()
        })
        .collect();
    let expected = ExpectedInvariants::gauss(3, 2, TABULATED).nondegenerate_dual(ambient);
    let chart = Chart::from_exprs(
        format!("join:{},{},N={ambient}", curve1.name(), curve2.name()),
        components,
        3,
    )
    .with_ruling(Ruling { base: 2, leaf: 1 })
    .with_expected(expected);
    RuledChart::try_from(chart)
}

/// `P^m × P^n → P^{mn+m+n}` in affine parameters `(a₁..a_m; b₁..b_n)`,
/// coordinates `x^i y^k` with `i` outer.
pub fn make_segre(m: usize, n: usize) -> Result<Chart> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("Segre factors need m, n ≥ 1"));
    }
    let x: Vec<Expr> = std::iter::once(Expr::one())
        .chain((0..m).map(Expr::var))
        .collect();
    let y: Vec<Expr> = std::iter::once(Expr::one())
        .chain((0..n).map(|k| Expr::var(m + k)))
        .collect();
    let components = x
        .iter()
        .flat_map(|xi| y.iter().map(move |yk| xi.clone() * yk.clone()))
        .collect();
    let ambient = m * n + m + n;
    let defect = m.abs_diff(n);
    let mut expected = ExpectedInvariants::gauss(m + n, m + n, TABULATED);
    if defect == 0 {
        expected = expected.nondegenerate_dual(ambient);
    } else {
        expected.delta_star = Some(defect);
        expected.n_star = Some(ambient - 1 - defect);
    }
    Ok(Chart::from_exprs(format!("segre:{m},{n}"), components, m + n).with_expected(expected))
}

fn symmetric_pairs() -> [(usize, usize); 6] {
    [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
}

/// Quadratic Veronese embedding of `P^2` into `P^5`, affine chart `u = (1, a, b)`.
pub fn make_veronese() -> Chart {
    let u = [Expr::one(), Expr::var(0), Expr::var(1)];
    let components = symmetric_pairs()
        .iter()
        .map(|&(i, j)| u[i].clone() * u[j].clone())
        .collect();
    let expected = ExpectedInvariants::gauss(2, 2, TABULATED).nondegenerate_dual(5);
    Chart::from_exprs("veronese", components, 2).with_expected(expected)
}

/// Rank-≤2 symmetric 3×3 matrices `u uᵀ + v vᵀ` with `u = (1, a, b)`,
/// `v = (0, c, e)`: a 4-parameter chart of the cubic symmetroid.
pub fn make_symmetroid() -> Chart {
    let u = [Expr::one(), Expr::var(0), Expr::var(1)];
    let v = [Expr::zero(), Expr::var(2), Expr::var(3)];
    let components = symmetric_pairs()
        .iter()
        .map(|&(i, j)| u[i].clone() * u[j].clone() + v[i].clone() * v[j].clone())
        .collect();
    let expected = ExpectedInvariants {
        n: Some(4),
        r: Some(2),
        l: Some(2),
        n_star: Some(2),
        l_star: Some(0),
        r_star: Some(2),
        delta_star: Some(0),
        source: TABULATED.to_string(),
    };
    Chart::from_exprs("symmetroid", components, 4).with_expected(expected)
}

/// Cone over a chart in `P^M` with a vertex `P^{l−1}` spanned by `l` new
/// coordinate points of `P^{M+l}`.
pub fn make_cone_with_new_vertex(base: &Chart, l: usize) -> Result<RuledChart> {
    let coords = base.ambient_dim() + 1;
    let lifted = base.transformed(&coordinate_embedding(coords + l, coords));
    let vertex = DMatrix::from_fn(coords + l, l, |i, a| if i == coords + a { 1.0 } else { 0.0 });
    make_cone(&lifted, &vertex)
}

/// Cone `C(m, n)` over `Segre(m, n)` with an `(l−1)`-dimensional vertex.
pub fn make_cone_over_segre(m: usize, n: usize, l: usize) -> Result<RuledChart> {
    if l == 0 {
        return Err(Error::invalid("cone over Segre needs l ≥ 1"));
    }
    let segre = make_segre(m, n)?;
    let cone = make_cone_with_new_vertex(&segre, l)?;
    let mut expected = ExpectedInvariants::gauss(m + n + l, m + n, TABULATED);
    if m == n {
        expected = expected.nondegenerate_dual(m * n + m + n + l);
    }
    let chart = cone
        .into_chart()
        .renamed(format!("cone_segre:{m},{n},l={l}"))
        .with_expected(expected);
    RuledChart::try_from(chart)
}
