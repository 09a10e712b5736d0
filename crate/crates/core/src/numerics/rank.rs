//! Rank decisions, kernels and subspace comparisons from singular values.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance used for every rank decision unless configured otherwise.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
/// Gap ratio below which a rank decision is flagged ambiguous.
pub const DEFAULT_CONFIDENCE_RATIO: f64 = 1e4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RankPolicy {
    pub tol: f64,
    pub confidence_ratio: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        RankPolicy {
            tol: DEFAULT_RANK_TOL,
            confidence_ratio: DEFAULT_CONFIDENCE_RATIO,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankDecision {
    pub rank: usize,
    /// Descending, all non-negative.
    pub singular_values: Vec<f64>,
    /// `σ_rank / σ_{rank+1}`; `+∞` when nothing lies below the cut
    /// (serialized as `null`).
    pub gap_ratio: f64,
    pub ambiguous: bool,
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("matrix has non-finite entries"))
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("rank tolerance {tol} outside (0, 1)")))
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.singular_values().iter().map(|s| s.max(0.0)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

fn decide(sv: Vec<f64>, policy: &RankPolicy) -> RankDecision {
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return RankDecision {
            rank: 0,
            singular_values: sv,
            gap_ratio: f64::INFINITY,
            ambiguous: false,
        };
    }
    let rank = sv.iter().take_while(|&&s| s > policy.tol * smax).count();
    let gap_ratio = match sv.get(rank) {
        Some(&next) if next > 0.0 => sv[rank - 1] / next,
        _ => f64::INFINITY,
    };
    let ambiguous = rank < sv.len() && gap_ratio < policy.confidence_ratio;
    RankDecision {
        rank,
        singular_values: sv,
        gap_ratio,
        ambiguous,
    }
}

/// Numerical rank with the default confidence ratio.
pub fn numerical_rank(m: &DMatrix<f64>, tol: f64) -> Result<RankDecision> {
    numerical_rank_with(
        m,
        &RankPolicy {
            tol,
            ..RankPolicy::default()
        },
    )
}

pub fn numerical_rank_with(m: &DMatrix<f64>, policy: &RankPolicy) -> Result<RankDecision> {
    check_finite(m)?;
    check_tol(policy.tol)?;
    Ok(decide(singular_values(m), policy))
}

/// Full SVD right factor of `m` (`cols × cols`) with singular values padded
/// with zeros. nalgebra only returns the thin factor, so wide matrices are
/// padded with zero rows first.
fn full_right_svd(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&k| svd.singular_values[k].max(0.0)).collect();
    let v = DMatrix::from_fn(cols, order.len(), |i, j| vt[(order[j], i)]);
    (sv, v)
}

/// Orthonormal columns spanning the kernel of `m` at relative tolerance `tol`.
pub fn nullspace_basis(m: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    check_finite(m)?;
    check_tol(tol)?;
    let cols = m.ncols();
    if m.nrows() == 0 {
        return Ok(DMatrix::identity(cols, cols));
    }
    let (sv, v) = full_right_svd(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = if smax == 0.0 {
        0
    } else {
        sv.iter().take_while(|&&s| s > tol * smax).count()
    };
    Ok(v.columns(rank, cols - rank).into_owned())
}

/// Kernel of a matrix whose rank has already been decided.
pub fn nullspace_with_rank(m: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let cols = m.ncols();
    if m.nrows() == 0 || rank == 0 {
        return DMatrix::identity(cols, cols);
    }
    let (_, v) = full_right_svd(m);
    v.columns(rank, cols - rank).into_owned()
}

/// Orthonormal basis of the leading `rank`-dimensional column space of `m`,
/// with the corresponding right singular vectors.
pub fn leading_subspaces(m: &DMatrix<f64>, rank: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let (rows, cols) = m.shape();
    if rank == 0 || m.is_empty() {
        return (DMatrix::zeros(rows, 0), DMatrix::zeros(cols, 0));
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let left = DMatrix::from_fn(rows, rank, |i, j| u[(i, order[j])]);
    let right = DMatrix::from_fn(cols, rank, |i, j| vt[(order[j], i)]);
    (left, right)
}

/// Orthonormal complement of the column span of `basis` (assumed orthonormal).
pub fn orthogonal_complement(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.nrows();
    if basis.ncols() == 0 {
        return DMatrix::identity(n, n);
    }
    nullspace_with_rank(&basis.transpose(), basis.ncols())
}

/// Orthonormalize the columns of `m` (assumed full column rank).
pub fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    leading_subspaces(m, m.ncols().min(m.nrows())).0
}

/// Principal angles (radians, descending) between the column spans of two
/// orthonormal bases of equal dimension, computed from sines so that small
/// angles keep full relative accuracy.
pub fn principal_angles(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    assert_eq!(a.nrows(), b.nrows());
    let residual = b - a * (a.transpose() * b);
    singular_values(&residual)
        .into_iter()
        .take(b.ncols())
        .map(|s| s.min(1.0).asin())
        .collect()
}

pub fn max_principal_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    principal_angles(a, b).into_iter().fold(0.0, f64::max)
}

/// Unit vector with the sign fixed so the largest-magnitude entry is positive.
pub fn canonical_direction(v: &DVector<f64>) -> (DVector<f64>, f64) {
    let norm = v.norm();
    let pivot = v.iamax();
    let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
    let scale = sign * norm;
    (v / scale, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_cuts_tiny_singular_value() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-12]));
        let d = numerical_rank(&m, 1e-8).unwrap();
        assert_eq!(d.rank, 1);
        assert!(!d.ambiguous);
        assert!((d.gap_ratio - 1e12).abs() < 1.0);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let d = numerical_rank(&DMatrix::zeros(3, 3), 1e-8).unwrap();
        assert_eq!(d.rank, 0);
        assert_eq!(d.gap_ratio, f64::INFINITY);
        assert!(!d.ambiguous);
    }

    #[test]
    fn full_rank_is_never_ambiguous() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        let d = numerical_rank(&m, 1e-8).unwrap();
        assert_eq!(d.rank, 2);
        assert_eq!(d.gap_ratio, f64::INFINITY);
        assert!(!d.ambiguous);
    }

    #[test]
    fn small_gap_is_ambiguous() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2e-8, 1e-9]));
        let d = numerical_rank(&m, 1e-8).unwrap();
        assert_eq!(d.rank, 2);
        assert!(d.ambiguous);
    }

    #[test]
    fn rejects_non_finite_and_bad_tolerance() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(numerical_rank(&m, 1e-8), Err(Error::InvalidInput(_))));
        assert!(numerical_rank(&DMatrix::zeros(1, 1), 1.5).is_err());
        assert!(nullspace_basis(&m, 1e-8).is_err());
    }

    #[test]
    fn kernel_of_single_row() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let k = nullspace_basis(&m, 1e-8).unwrap();
        assert_eq!(k.ncols(), 2);
        assert!((k.transpose() * &k - DMatrix::identity(2, 2)).amax() < 1e-14);
        assert!((&m * &k).amax() < 1e-14);
    }

    #[test]
    fn full_rank_square_has_empty_kernel() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0]);
        assert_eq!(nullspace_basis(&m, 1e-8).unwrap().ncols(), 0);
    }

    #[test]
    fn twisted_cubic_tangent_hyperplanes() {
        // point and velocity of t ↦ (1, t, t², t³) at t = 1
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 2.0, 3.0]);
        let k = nullspace_basis(&m, 1e-8).unwrap();
        assert_eq!(k.ncols(), 2);
        // Oracle: the tangent line is spanned by (1,1,1,1) and (0,1,2,3); the
        // hyperplanes (1,-2,1,0) and (0,1,-2,1) both contain it and are independent.
        let expected = orthonormalize(&DMatrix::from_column_slice(
            4,
            2,
            &[1.0, -2.0, 1.0, 0.0, 0.0, 1.0, -2.0, 1.0],
        ));
        assert!(max_principal_angle(&expected, &k) < 1e-12);
    }

    #[test]
    fn principal_angles_of_rotated_line() {
        let a = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let t: f64 = 1e-9;
        let b = DMatrix::from_column_slice(2, 1, &[t.cos(), t.sin()]);
        let ang = principal_angles(&a, &b);
        assert!((ang[0] - t).abs() < 1e-20);
    }

    #[test]
    fn canonical_direction_fixes_sign() {
        let (u, s) = canonical_direction(&DVector::from_vec(vec![0.1, -3.0, 0.2]));
        assert!(u[1] > 0.0);
        assert!((u.norm() - 1.0).abs() < 1e-15);
        assert!(s < 0.0);
    }
}
