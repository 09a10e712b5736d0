//! Deterministic numerical kernels: jet arithmetic, SVD-based rank and kernels,
//! polynomial interpolation and real root finding.

pub mod expr;
pub mod jet;
pub mod poly;
pub mod rank;
pub mod taylor;

pub use expr::Expr;
pub use jet::Jet2;
pub use poly::{chebyshev_nodes, poly_from_samples, real_roots, Poly1, Root, RootOptions};
pub use rank::{
    max_principal_angle, nullspace_basis, numerical_rank, numerical_rank_with, principal_angles,
    RankDecision, RankPolicy, DEFAULT_CONFIDENCE_RATIO, DEFAULT_RANK_TOL,
};
pub use taylor::{Scalar, Taylor2};
