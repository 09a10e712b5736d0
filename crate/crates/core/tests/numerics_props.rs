use dualrank_core::numerics::rank::{nullspace_with_rank, orthonormalize};
use dualrank_core::numerics::{
    chebyshev_nodes, nullspace_basis, numerical_rank, poly_from_samples, Expr, Scalar, Taylor2,
};
use dualrank_core::rng::{gaussian_matrix, random_orthogonal, stream};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn low_rank(rows: usize, cols: usize, rank: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = stream(seed, 0);
    gaussian_matrix(rows, rank, &mut rng) * gaussian_matrix(rank, cols, &mut rng)
}

fn permutation(size: usize, seed: u64) -> DMatrix<f64> {
    let mut order: Vec<usize> = (0..size).collect();
    let mut s = seed;
    for i in (1..size).rev() {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        order.swap(i, (s >> 33) as usize % (i + 1));
    }
    DMatrix::from_fn(size, size, |i, j| if order[i] == j { 1.0 } else { 0.0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_survives_permutations_and_rotations(
        rows in 1usize..8, cols in 1usize..8, k in 0usize..8, seed in any::<u64>()
    ) {
        let k = k.min(rows).min(cols);
        let m = low_rank(rows, cols, k, seed);
        let mut rng = stream(seed, 1);
        let q = random_orthogonal(rows, &mut rng);
        let p = permutation(cols, seed);
        let base = numerical_rank(&m, 1e-8).unwrap();
        let moved = numerical_rank(&(q * &m * p), 1e-8).unwrap();
        prop_assert_eq!(base.rank, k);
        prop_assert_eq!(moved.rank, k);
        prop_assert!(!base.ambiguous);
    }

    #[test]
    fn nullspace_is_orthonormal_and_annihilated(
        rows in 1usize..8, cols in 1usize..8, k in 0usize..8, seed in any::<u64>()
    ) {
        let k = k.min(rows).min(cols);
        let m = low_rank(rows, cols, k, seed);
        let basis = nullspace_basis(&m, 1e-8).unwrap();
        prop_assert_eq!(basis.ncols(), cols - k);
        let residual = (&m * &basis).amax();
        prop_assert!(residual <= 1e-10 * m.norm().max(1.0));
        let gram = basis.transpose() * &basis - DMatrix::identity(cols - k, cols - k);
        prop_assert!(gram.amax() <= 1e-12);
        let same = nullspace_with_rank(&m, k);
        prop_assert_eq!(same.ncols(), basis.ncols());
    }

    #[test]
    fn interpolation_round_trips(
        coeffs in prop::collection::vec(-3.0f64..3.0, 1..8),
        lo in -2.0f64..0.0, width in 0.5f64..4.0
    ) {
        let degree = coeffs.len() - 1;
        let eval = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let xs = chebyshev_nodes(degree + 1, lo, lo + width);
        let ys: Vec<f64> = xs.iter().map(|&x| eval(x)).collect();
        let p = poly_from_samples(&xs, &ys, degree).unwrap();
        for (a, b) in p.coefficients.iter().zip(&coeffs) {
            prop_assert!((a - b).abs() <= 1e-8 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn taylor_matches_symbolic_derivatives(x in -1.5f64..1.5, y in -1.5f64..1.5) {
        // f = sin(x y) + x³ / (2 + y²)
        let (vx, vy) = (Expr::var(0), Expr::var(1));
        let f = (vx.clone() * vy.clone()).sin()
            + vx.clone().pow(3) * (Expr::constant(2.0) + vy.clone().pow(2)).recip();
        let t = f.eval(&Taylor2::variables(&[x, y]));
        let point = [x, y];
        prop_assert!((t.value() - f.eval(&point)).abs() < 1e-14);
        for i in 0..2 {
            let di = f.diff(i);
            prop_assert!((t.grad()[i] - di.eval(&point)).abs() < 1e-12);
            for j in 0..2 {
                let dij = di.diff(j).eval(&point);
                prop_assert!((t.hess(i, j) - dij).abs() < 1e-11 * (1.0 + dij.abs()));
            }
        }
    }
}

#[test]
fn orthonormalize_keeps_span() {
    let m = low_rank(6, 3, 3, 9);
    let q = orthonormalize(&m);
    let resid = &m - &q * (q.transpose() * &m);
    assert!(resid.amax() < 1e-12);
}
