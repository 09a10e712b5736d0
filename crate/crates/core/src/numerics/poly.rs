//! Univariate polynomials: Vandermonde interpolation and real roots from
//! companion-matrix eigenvalues.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Default cluster width for merging repeated roots.
pub const ROOT_CLUSTER_TOL: f64 = 1e-6;
/// Default absolute floor below which a polynomial counts as identically zero.
pub const ZERO_POLY_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Poly1 {
    /// Ascending degree; length is `degree_bound + 1`.
    pub coefficients: Vec<f64>,
    pub degree_bound: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Root {
    pub location: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// `max |coeff|` below this means the polynomial is identically zero.
    pub zero_floor: f64,
    pub cluster_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            zero_floor: ZERO_POLY_FLOOR,
            cluster_tol: ROOT_CLUSTER_TOL,
        }
    }
}

impl Poly1 {
    pub fn new(coefficients: Vec<f64>) -> Poly1 {
        assert!(!coefficients.is_empty());
        let degree_bound = coefficients.len() - 1;
        Poly1 {
            coefficients,
            degree_bound,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    fn derivative_at(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Degree after dropping leading coefficients that are negligible
    /// relative to the largest one.
    pub fn effective_degree(&self, rel: f64) -> usize {
        let cut = rel * self.max_abs_coefficient();
        self.coefficients
            .iter()
            .rposition(|c| c.abs() > cut)
            .unwrap_or(0)
    }
}

/// Chebyshev points of the first kind mapped to `[lo, hi]`, ascending.
pub fn chebyshev_nodes(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut xs: Vec<f64> = (0..count)
        .map(|k| {
            let theta = std::f64::consts::PI * (2 * k + 1) as f64 / (2 * count) as f64;
            mid - half * theta.cos()
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

/// Interpolating polynomial of degree ≤ `degree_bound` through the samples.
pub fn poly_from_samples(xs: &[f64], ys: &[f64], degree_bound: usize) -> Result<Poly1> {
    if xs.len() != degree_bound + 1 || ys.len() != xs.len() {
        return Err(Error::invalid(format!(
            "need exactly {} samples, got {} abscissae and {} ordinates",
            degree_bound + 1,
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite sample"));
    }
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            if xs[i] == xs[j] {
                return Err(Error::invalid(format!("duplicate abscissa {}", xs[i])));
            }
        }
    }
    let n = xs.len();
    let vandermonde = DMatrix::from_fn(n, n, |i, k| xs[i].powi(k as i32));
    let rhs = DVector::from_column_slice(ys);
    let sol = vandermonde
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::invalid("singular Vandermonde system"))?;
    Ok(Poly1 {
        coefficients: sol.iter().copied().collect(),
        degree_bound,
    })
}

/// Real roots of `p` in `[lo, hi]`, ascending, with cluster multiplicities.
///
/// An identically-zero polynomial yields [`Error::DegenerateLeaf`].
pub fn real_roots(p: &Poly1, interval: (f64, f64), opts: &RootOptions) -> Result<Vec<Root>> {
    let (lo, hi) = interval;
    if !(lo < hi) {
        return Err(Error::invalid(format!("empty interval [{lo}, {hi}]")));
    }
    let scale = p.max_abs_coefficient();
    if scale < opts.zero_floor {
        return Err(Error::DegenerateLeaf);
    }
    let degree = p.effective_degree(1e-13);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = p.coefficients[degree];
    let candidates: Vec<f64> = if degree == 1 {
        vec![-p.coefficients[0] / lead]
    } else {
        let mut companion = DMatrix::zeros(degree, degree);
        for i in 1..degree {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..degree {
            companion[(i, degree - 1)] = -p.coefficients[i] / lead;
        }
        companion
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im.abs() <= opts.cluster_tol * (1.0 + z.re.abs()))
            .map(|z| z.re)
            .collect()
    };

    let mut real: Vec<f64> = candidates.into_iter().map(|x| polish(p, x)).collect();
    real.sort_by(f64::total_cmp);

    let mut roots: Vec<Root> = Vec::new();
    let mut cluster: Vec<f64> = Vec::new();
    let flush = |cluster: &mut Vec<f64>, roots: &mut Vec<Root>| {
        if !cluster.is_empty() {
            let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
            roots.push(Root {
                location: mean,
                multiplicity: cluster.len(),
            });
            cluster.clear();
        }
    };
    for x in real {
        if let Some(&last) = cluster.last() {
            if x - last > opts.cluster_tol {
                flush(&mut cluster, &mut roots);
            }
        }
        cluster.push(x);
    }
    flush(&mut cluster, &mut roots);

    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    Ok(roots
        .into_iter()
        .filter(|r| r.location >= lo - slack && r.location <= hi + slack)
        .collect())
}

/// A few guarded Newton steps; keeps the original estimate if they do not help.
fn polish(p: &Poly1, x0: f64) -> f64 {
    let mut x = x0;
    let mut fx = p.eval(x).abs();
    for _ in 0..4 {
        let d = p.derivative_at(x);
        if d == 0.0 {
            break;
        }
        let cand = x - p.eval(x) / d;
        let fc = p.eval(cand).abs();
        if fc < fx && (cand - x0).abs() < 1e-3 {
            x = cand;
            fx = fc;
        } else {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_through_two_points() {
        let p = poly_from_samples(&[0.0, 1.0], &[0.0, 1.0], 1).unwrap();
        assert!(p.coefficients[0].abs() < 1e-15);
        assert!((p.coefficients[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parabola_through_three_points() {
        let p = poly_from_samples(&[-1.0, 0.0, 1.0], &[1.0, 0.0, 1.0], 2).unwrap();
        let expected = [0.0, 0.0, 1.0];
        for (c, e) in p.coefficients.iter().zip(expected) {
            assert!((c - e).abs() < 1e-15);
        }
    }

    #[test]
    fn duplicate_abscissae_rejected() {
        assert!(matches!(
            poly_from_samples(&[0.5, 0.5], &[1.0, 2.0], 1),
            Err(Error::InvalidInput(_))
        ));
        assert!(poly_from_samples(&[0.0], &[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn root_of_identity_polynomial() {
        let roots = real_roots(&Poly1::new(vec![0.0, 1.0]), (-1.0, 1.0), &RootOptions::default())
            .unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].location, 0.0);
        assert_eq!(roots[0].multiplicity, 1);
    }

    #[test]
    fn roots_of_s_squared_minus_one() {
        let roots = real_roots(
            &Poly1::new(vec![-1.0, 0.0, 1.0]),
            (-2.0, 2.0),
            &RootOptions::default(),
        )
        .unwrap();
        let locs: Vec<f64> = roots.iter().map(|r| r.location).collect();
        assert_eq!(locs.len(), 2);
        assert!((locs[0] + 1.0).abs() < 1e-14);
        assert!((locs[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn double_root_reported_once_with_multiplicity_two() {
        // (s - 1)^2
        let roots = real_roots(
            &Poly1::new(vec![1.0, -2.0, 1.0]),
            (-2.0, 2.0),
            &RootOptions::default(),
        )
        .unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert!((roots[0].location - 1.0).abs() < 1e-7);
    }

    #[test]
    fn complex_roots_and_out_of_interval_roots_dropped() {
        // (s^2 + 1)(s - 3)
        let p = Poly1::new(vec![-3.0, 1.0, -3.0, 1.0]);
        assert!(real_roots(&p, (-2.0, 2.0), &RootOptions::default())
            .unwrap()
            .is_empty());
        assert_eq!(real_roots(&p, (-4.0, 4.0), &RootOptions::default()).unwrap().len(), 1);
    }

    #[test]
    fn zero_polynomial_is_degenerate() {
        let p = Poly1::new(vec![1e-13, -1e-14, 0.0]);
        assert!(matches!(
            real_roots(&p, (-1.0, 1.0), &RootOptions::default()),
            Err(Error::DegenerateLeaf)
        ));
    }

    #[test]
    fn chebyshev_nodes_are_interior_and_sorted() {
        let xs = chebyshev_nodes(4, -2.0, 2.0);
        assert_eq!(xs.len(), 4);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert!(xs.iter().all(|&x| x > -2.0 && x < 2.0));
    }
}
