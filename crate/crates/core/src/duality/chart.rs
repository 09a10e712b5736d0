//! The chart of tangent hyperplanes.
//!
//! Near a base point `u₀` the hyperplanes containing the embedded tangent
//! space `T(u)` form a linear fiber of dimension `N − n − 1`. A local section
//! is obtained by projecting a fixed affine family `w(t) = k₀ + Σ t^σ k_σ`
//! (the fiber at `u₀`) onto the annihilator of `T(u)`:
//!
//! `ξ(u, t) = w − A'(u)ᵀ (A'(u) A'(u)ᵀ)⁻¹ A'(u) w`,
//!
//! where `A'` stacks `n + 1` fixed combinations of `x, ∂_i x` that are
//! orthonormal at `u₀`. The formula is run in second-order Taylor arithmetic
//! over `(u, t)`, with the primal tangent jets supplying exact derivatives of
//! `A'`, so the dual chart's jets are exact up to rounding.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::catalogue::{Chart, ChartMap};
use crate::error::{Error, Result};
use crate::gauss::GaussAnalysis;
use crate::numerics::rank::{leading_subspaces, nullspace_with_rank, singular_values};
use crate::numerics::{Jet2, Scalar, Taylor2};

#[derive(Debug)]
struct DualMap {
    primal: Arc<dyn ChartMap>,
    /// `(n + 1) × (d + 1)`: rows of `A'` as combinations of `x, ∂_i x`.
    whitening: DMatrix<f64>,
    /// `(N + 1) × (N − n)`: orthonormal fiber at the base point, `k₀` first.
    fiber: DMatrix<f64>,
}

impl DualMap {
    fn base_dim(&self) -> usize {
        self.primal.param_dim()
    }

    fn fiber_count(&self) -> usize {
        self.fiber.ncols() - 1
    }
}

impl ChartMap for DualMap {
    fn param_dim(&self) -> usize {
        self.base_dim() + self.fiber_count()
    }

    fn coords(&self) -> usize {
        self.fiber.nrows()
    }

    fn jet(&self, p: &[f64]) -> Jet2 {
        let d = self.base_dim();
        let dim = self.param_dim();
        let coords = self.coords();
        let (u, t) = p.split_at(d);

        let rows: Vec<Vec<Taylor2>> = self
            .primal
            .tangent_jets(u)
            .iter()
            .map(|j| j.to_taylor(dim))
            .collect();

        let a: Vec<Vec<Taylor2>> = self
            .whitening
            .row_iter()
            .map(|weights| {
                let mut out = vec![Taylor2::constant(0.0, dim); coords];
                for (j, row) in rows.iter().enumerate() {
                    let c = weights[j];
                    if c != 0.0 {
                        for (o, x) in out.iter_mut().zip(row) {
                            o.add_scaled(x, c);
                        }
                    }
                }
                out
            })
            .collect();

        let w: Vec<Taylor2> = (0..coords)
            .map(|c| {
                let mut wc = Taylor2::constant(self.fiber[(c, 0)], dim);
                for (s, ts) in t.iter().enumerate() {
                    wc.add_scaled(&Taylor2::variable(*ts, d + s, dim), self.fiber[(c, s + 1)]);
                }
                wc
            })
            .collect();

        let m = a.len();
        let mut gram = vec![vec![Taylor2::constant(0.0, dim); m]; m];
        for i in 0..m {
            for j in i..m {
                let mut g = Taylor2::constant(0.0, dim);
                for (x, y) in a[i].iter().zip(&a[j]) {
                    g.add_product(x, y);
                }
                gram[j][i] = g.clone();
                gram[i][j] = g;
            }
        }
        let mut y: Vec<Taylor2> = a
            .iter()
            .map(|ai| {
                let mut s = Taylor2::constant(0.0, dim);
                for (x, y) in ai.iter().zip(&w) {
                    s.add_product(x, y);
                }
                s
            })
            .collect();

        // The Gram matrix is the identity at the base point, so elimination
        // without pivoting is stable in the neighbourhood the chart is used in.
        for i in 0..m {
            let inv = gram[i][i].recip();
            let (pivot_rows, rest) = gram.split_at_mut(i + 1);
            let pivot = &pivot_rows[i];
            for (j, row) in rest.iter_mut().enumerate() {
                let j = j + i + 1;
                let factor = row[i].clone() * inv.clone();
                for (target, p) in row[i..].iter_mut().zip(&pivot[i..]) {
                    let delta = factor.clone() * p.clone();
                    target.add_scaled(&delta, -1.0);
                }
                let delta = factor * y[i].clone();
                y[j].add_scaled(&delta, -1.0);
            }
        }
        for i in (0..m).rev() {
            let mut s = y[i].clone();
            for k in (i + 1)..m {
                let delta = gram[i][k].clone() * y[k].clone();
                s.add_scaled(&delta, -1.0);
            }
            y[i] = s * gram[i][i].recip();
        }

        let xi: Vec<Taylor2> = (0..coords)
            .map(|c| {
                let mut out = w[c].clone();
                for (ak, yk) in a.iter().zip(&y) {
                    let delta = ak[c].clone() * yk.clone();
                    out.add_scaled(&delta, -1.0);
                }
                out
            })
            .collect();
        Jet2::from_taylor(&xi)
    }
}

/// Dual chart built around a base point, with parameters `(u, t)`.
#[derive(Clone, Debug)]
pub struct DualChart {
    pub chart: Chart,
    pub base_point: Vec<f64>,
    pub fiber_count: usize,
}

impl DualChart {
    /// Parameter vector `(u₀, t)`.
    pub fn point(&self, t: &[f64]) -> Vec<f64> {
        assert_eq!(t.len(), self.fiber_count);
        let mut p = self.base_point.clone();
        p.extend_from_slice(t);
        p
    }
}

/// Build the tangent-hyperplane chart around `analysis.frame.param_point`.
pub fn dual_chart(chart: &Chart, analysis: &GaussAnalysis) -> Result<DualChart> {
    let big_n = chart.ambient_dim();
    let n = analysis.n;
    if n >= big_n {
        return Err(Error::precondition(format!(
            "{}: dimension {n} leaves no hyperplanes tangent in P^{big_n}",
            chart.name()
        )));
    }
    let u0 = &analysis.frame.param_point;
    let jet = chart.jet(u0)?;
    let span = jet.span_rows();
    let (left, _) = leading_subspaces(&span, n + 1);
    let sv = singular_values(&span);
    let inv = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n + 1,
        sv.iter().take(n + 1).map(|s| 1.0 / s),
    ));
    let whitening = inv * left.transpose();
    let fiber = nullspace_with_rank(&span, n + 1);

    let map = DualMap {
        primal: chart.map().clone(),
        whitening,
        fiber,
    };
    let fiber_count = map.fiber_count();
    Ok(DualChart {
        chart: Chart::new(format!("dual({})", chart.name()), Arc::new(map)),
        base_point: u0.clone(),
        fiber_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue::{make_curve_chart, CurveKind};
    use crate::gauss::analyze_at;
    use crate::numerics::RankPolicy;

    #[test]
    fn hyperplanes_contain_the_tangent_space() {
        let c = make_curve_chart(CurveKind::TwistedCubic, 3).unwrap();
        let a = analyze_at(&c, &[0.4], &RankPolicy::default()).unwrap();
        let dual = dual_chart(&c, &a).unwrap();
        assert_eq!(dual.chart.param_dim(), 2);
        for (du, t) in [(0.0, 0.3), (0.05, -0.7), (-0.1, 1.5)] {
            let u = 0.4 + du;
            let xi = dual.chart.value(&[u, t]).unwrap();
            let jet = c.jet(&[u]).unwrap();
            let scale = xi.norm() * jet.value.norm();
            assert!(xi.dot(&jet.value).abs() <= 1e-12 * scale);
            assert!(xi.dot(&jet.jacobian.column(0)).abs() <= 1e-12 * scale * 10.0);
        }
    }

    #[test]
    fn twisted_cubic_dual_jet_matches_closed_form() {
        // Hyperplanes tangent to (1, u, u², u³) are spanned by (u², −2u, 1, 0)
        // and (0, u², −2u, 1).
        let c = make_curve_chart(CurveKind::TwistedCubic, 3).unwrap();
        let a = analyze_at(&c, &[0.2], &RankPolicy::default()).unwrap();
        let dual = dual_chart(&c, &a).unwrap();
        for u in [0.2, 0.25, 0.1] {
            let xi = dual.chart.value(&[u, 0.4]).unwrap();
            let basis = DMatrix::from_column_slice(
                4,
                2,
                &[u * u, -2.0 * u, 1.0, 0.0, 0.0, u * u, -2.0 * u, 1.0],
            );
            let q = crate::numerics::rank::orthonormalize(&basis);
            let resid = &xi - &q * (q.transpose() * &xi);
            assert!(resid.norm() <= 1e-12 * xi.norm());
        }
    }
}
