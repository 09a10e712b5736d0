#![allow(dead_code)]

use dualrank_core::catalogue::Chart;
use dualrank_core::rng::{gaussian_matrix, stream};
use nalgebra::{DMatrix, DVector};

/// Finite-difference comparison of a chart jet at `u`.
///
/// Returns the relative errors of the first and second derivatives, each
/// measured against `max(1, ‖exact‖)`. Derivatives are taken from chart values
/// only, so the oracle is independent of the jet arithmetic.
pub fn jet_fd_errors(chart: &Chart, u: &[f64]) -> (f64, f64) {
    let jet = chart.jet(u).unwrap();
    let d = u.len();
    let value = |p: &[f64]| -> DVector<f64> { chart.value(p).unwrap() };
    let shifted = |steps: &[(usize, f64)]| {
        let mut p = u.to_vec();
        for &(i, h) in steps {
            p[i] += h;
        }
        value(&p)
    };

    let h1 = 1e-5;
    let mut fd_jac = DMatrix::zeros(jet.coords(), d);
    for i in 0..d {
        let col = (shifted(&[(i, h1)]) - shifted(&[(i, -h1)])) / (2.0 * h1);
        fd_jac.set_column(i, &col);
    }
    let first = (&fd_jac - &jet.jacobian).norm() / jet.jacobian.norm().max(1.0);

    let h2 = 1e-4;
    let hess_norm = jet
        .hessians
        .iter()
        .map(|h| h.norm_squared())
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    let mut diff_sq = 0.0;
    for i in 0..d {
        for j in i..d {
            let fd = if i == j {
                (shifted(&[(i, h2)]) - value(u) * 2.0 + shifted(&[(i, -h2)])) / (h2 * h2)
            } else {
                (shifted(&[(i, h2), (j, h2)]) - shifted(&[(i, h2), (j, -h2)])
                    - shifted(&[(i, -h2), (j, h2)])
                    + shifted(&[(i, -h2), (j, -h2)]))
                    / (4.0 * h2 * h2)
            };
            let mult = if i == j { 1.0 } else { 2.0 };
            for c in 0..jet.coords() {
                diff_sq += mult * (fd[c] - jet.hessians[c][(i, j)]).powi(2);
            }
        }
    }
    (first, diff_sq.sqrt() / hess_norm)
}

/// Seeded, well-conditioned random invertible matrix.
pub fn random_invertible(size: usize, seed: u64, index: u64) -> DMatrix<f64> {
    let mut rng = stream(seed, index);
    loop {
        let m = gaussian_matrix(size, size, &mut rng) + DMatrix::identity(size, size) * 2.0;
        let sv = m.singular_values();
        if sv.min() > 1e-2 * sv.max() {
            return m;
        }
    }
}

/// `dim` of `(p × q)` matrices of rank `≤ k`, projectivized.
pub fn determinantal_dim(p: usize, q: usize, k: usize) -> usize {
    k * (p + q - k) - 1
}
