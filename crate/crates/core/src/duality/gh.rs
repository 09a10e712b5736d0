//! Singularity test for the pencil of second fundamental forms.
//!
//! `D(ξ) = det(Σ_α ξ_α B^α)` is a homogeneous polynomial of degree `r` in the
//! `k = N − n` normal coordinates. Every tangent hyperplane is singular exactly
//! when `D` vanishes identically.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauss::SecondFundamentalSystem;
use crate::rng::{random_unit_vectors, DetRng};

/// Number of random directions in probabilistic mode.
pub const GH_PROBES: usize = 50;
/// `D` counts as zero below this multiple of `(max ‖B^α‖)^r`.
pub const GH_REL_THRESHOLD: f64 = 1e-10;
/// Values within this factor above the threshold are inconclusive.
pub const GH_INCONCLUSIVE_BAND: f64 = 1e4;
/// Interpolation is used only up to this degree and number of variables.
pub const GH_INTERPOLATION_LIMIT: usize = 6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GhMode {
    Probabilistic,
    Interpolated,
    #[default]
    Auto,
}

impl fmt::Display for GhMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GhMode::Probabilistic => "probabilistic",
            GhMode::Interpolated => "interpolated",
            GhMode::Auto => "auto",
        })
    }
}

impl FromStr for GhMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probabilistic" => Ok(GhMode::Probabilistic),
            "interpolated" => Ok(GhMode::Interpolated),
            "auto" => Ok(GhMode::Auto),
            _ => Err(Error::invalid(format!("unknown gh mode `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GhOutcome {
    /// The mode whose verdict is reported (never `Auto`).
    pub mode: GhMode,
    pub all_singular: bool,
    /// Largest `|D|` over the evaluated directions.
    pub max_abs_det: f64,
    /// Largest recovered coefficient of `D` (interpolated mode only).
    pub max_abs_coefficient: Option<f64>,
    pub threshold: f64,
}

fn classify(statistic: f64, threshold: f64, what: &str) -> Result<bool> {
    if statistic <= threshold {
        Ok(true)
    } else if statistic < GH_INCONCLUSIVE_BAND * threshold {
        Err(Error::Inconclusive(format!(
            "{what} {statistic:.3e} is within {GH_INCONCLUSIVE_BAND:.0e} of the threshold {threshold:.3e}"
        )))
    } else {
        Ok(false)
    }
}

fn pencil_det(b: &[DMatrix<f64>], xi: &[f64]) -> f64 {
    let r = b[0].nrows();
    let mut m = DMatrix::zeros(r, r);
    for (ba, x) in b.iter().zip(xi) {
        m += ba * *x;
    }
    m.determinant()
}

/// Exponent vectors of all monomials of degree `degree` in `vars` variables,
/// in lexicographic order.
pub fn monomial_exponents(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    fn rec(vars: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() + 1 == vars {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(vars, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if vars > 0 {
        rec(vars, degree, &mut Vec::new(), &mut out);
    }
    out
}

fn probabilistic(b: &[DMatrix<f64>], threshold: f64, rng: &mut DetRng) -> Result<GhOutcome> {
    let dirs = random_unit_vectors(b.len(), GH_PROBES, rng);
    let max_abs_det = dirs
        .column_iter()
        .map(|c| pencil_det(b, c.as_slice()).abs())
        .fold(0.0, f64::max);
    Ok(GhOutcome {
        mode: GhMode::Probabilistic,
        all_singular: classify(max_abs_det, threshold, "max |det|")?,
        max_abs_det,
        max_abs_coefficient: None,
        threshold,
    })
}

fn interpolated(b: &[DMatrix<f64>], threshold: f64) -> Result<GhOutcome> {
    let r = b[0].nrows();
    let exps = monomial_exponents(b.len(), r);
    let nodes: Vec<Vec<f64>> = exps
        .iter()
        .map(|e| e.iter().map(|&k| k as f64 / r as f64).collect())
        .collect();
    let vander = DMatrix::from_fn(nodes.len(), exps.len(), |i, j| {
        nodes[i]
            .iter()
            .zip(&exps[j])
            .map(|(x, &k)| x.powi(k as i32))
            .product()
    });
    let values = DVector::from_iterator(nodes.len(), nodes.iter().map(|x| pencil_det(b, x)));
    let coeffs = vander
        .lu()
        .solve(&values)
        .ok_or_else(|| Error::Inconclusive("singular interpolation system".into()))?;
    let max_abs_coefficient = coeffs.amax();
    Ok(GhOutcome {
        mode: GhMode::Interpolated,
        all_singular: classify(max_abs_coefficient, threshold, "max |coefficient|")?,
        max_abs_det: values.amax(),
        max_abs_coefficient: Some(max_abs_coefficient),
        threshold,
    })
}

pub fn interpolation_applicable(sff: &SecondFundamentalSystem) -> bool {
    sff.rank() <= GH_INTERPOLATION_LIMIT && sff.b.len() <= GH_INTERPOLATION_LIMIT
}

/// Decide whether `det(Σ ξ_α B^α)` vanishes for every `ξ`.
///
/// In `Auto` mode the interpolated verdict is reported when applicable and the
/// probabilistic one must agree with it; disagreement is inconclusive.
pub fn gh_singularity_test(
    sff: &SecondFundamentalSystem,
    mode: GhMode,
    rng: &mut DetRng,
) -> Result<GhOutcome> {
    if sff.b.is_empty() {
        return Err(Error::precondition("no normal directions"));
    }
    let r = sff.rank();
    if r == 0 {
        // The empty determinant is 1: every hyperplane is nonsingular.
        return Ok(GhOutcome {
            mode: if mode == GhMode::Auto {
                GhMode::Probabilistic
            } else {
                mode
            },
            all_singular: false,
            max_abs_det: 1.0,
            max_abs_coefficient: None,
            threshold: GH_REL_THRESHOLD,
        });
    }
    let threshold = GH_REL_THRESHOLD * sff.max_norm().powi(r as i32);
    match mode {
        GhMode::Probabilistic => probabilistic(&sff.b, threshold, rng),
        GhMode::Interpolated => {
            if !interpolation_applicable(sff) {
                return Err(Error::precondition(format!(
                    "interpolation needs r ≤ {GH_INTERPOLATION_LIMIT} and N − n ≤ {GH_INTERPOLATION_LIMIT}"
                )));
            }
            interpolated(&sff.b, threshold)
        }
        GhMode::Auto => {
            let prob = probabilistic(&sff.b, threshold, rng)?;
            if !interpolation_applicable(sff) {
                return Ok(prob);
            }
            let interp = interpolated(&sff.b, threshold)?;
            if interp.all_singular != prob.all_singular {
                return Err(Error::Inconclusive(
                    "interpolated and probabilistic verdicts disagree".into(),
                ));
            }
            Ok(interp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn system(b: Vec<DMatrix<f64>>) -> SecondFundamentalSystem {
        let r = b[0].nrows();
        SecondFundamentalSystem {
            b,
            transversal_basis: DMatrix::identity(r, r),
            leaf_basis: DMatrix::zeros(r, 0),
        }
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomial_exponents(6, 5).len(), 252);
        assert_eq!(monomial_exponents(2, 3).len(), 4);
        assert_eq!(monomial_exponents(1, 4), vec![vec![4]]);
    }

    #[test]
    fn single_nonzero_form_is_nonsingular() {
        let s = system(vec![DMatrix::from_element(1, 1, 3.0)]);
        for mode in [GhMode::Probabilistic, GhMode::Interpolated, GhMode::Auto] {
            let out = gh_singularity_test(&s, mode, &mut stream(1, 0)).unwrap();
            assert!(!out.all_singular);
        }
    }

    #[test]
    fn rank_deficient_pencil_is_singular() {
        // every combination of these has the third row and column zero
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let s = system(vec![a, b]);
        let out = gh_singularity_test(&s, GhMode::Auto, &mut stream(1, 0)).unwrap();
        assert!(out.all_singular);
        assert_eq!(out.mode, GhMode::Interpolated);
    }

    #[test]
    fn interpolation_recovers_known_polynomial() {
        // det(x I + y S) = x² − y² with S the coordinate swap
        let a = DMatrix::identity(2, 2);
        let b = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let out = interpolated(&[a, b], 1e-10).unwrap();
        assert!(!out.all_singular);
        assert!((out.max_abs_coefficient.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forced_interpolation_respects_limits() {
        let s = system(vec![DMatrix::identity(7, 7)]);
        assert!(gh_singularity_test(&s, GhMode::Interpolated, &mut stream(1, 0)).is_err());
        let out = gh_singularity_test(&s, GhMode::Auto, &mut stream(1, 0)).unwrap();
        assert_eq!(out.mode, GhMode::Probabilistic);
    }
}
