use nalgebra::{DMatrix, DVector};

use super::taylor::{Scalar, Taylor2};

/// Value, first and second derivatives of a chart at a parameter point.
///
/// `value` holds the `N + 1` homogeneous coordinates, `jacobian` is
/// `(N + 1) × d` and `hessians[c]` is the `d × d` Hessian of coordinate `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    pub hessians: Vec<DMatrix<f64>>,
}

impl Jet2 {
    pub fn from_taylor(components: &[Taylor2]) -> Jet2 {
        let rows = components.len();
        let d = components.first().map_or(0, |t| t.dim());
        let value = DVector::from_iterator(rows, components.iter().map(|t| t.value()));
        let jacobian = DMatrix::from_fn(rows, d, |c, i| components[c].grad()[i]);
        let hessians = components
            .iter()
            .map(|t| DMatrix::from_fn(d, d, |i, j| t.hess(i, j)))
            .collect();
        Jet2 {
            value,
            jacobian,
            hessians,
        }
    }

    /// Coordinates as Taylor numbers over `dim ≥ d` variables.
    pub fn to_taylor(&self, dim: usize) -> Vec<Taylor2> {
        let d = self.param_dim();
        (0..self.value.len())
            .map(|c| {
                let grad = self.jacobian.row(c).iter().copied().collect();
                let hess = self.hessians[c].transpose().iter().copied().collect();
                Taylor2::from_parts(self.value[c], grad, hess).embed(dim.max(d))
            })
            .collect()
    }

    pub fn param_dim(&self) -> usize {
        self.jacobian.ncols()
    }

    pub fn coords(&self) -> usize {
        self.value.len()
    }

    /// Apply a linear map `M` to the homogeneous output.
    pub fn transform(&self, m: &DMatrix<f64>) -> Jet2 {
        assert_eq!(m.ncols(), self.coords());
        let d = self.param_dim();
        let hessians = (0..m.nrows())
            .map(|r| {
                let mut h = DMatrix::zeros(d, d);
                for (c, hc) in self.hessians.iter().enumerate() {
                    let w = m[(r, c)];
                    if w != 0.0 {
                        h += hc * w;
                    }
                }
                h
            })
            .collect();
        Jet2 {
            value: m * &self.value,
            jacobian: m * &self.jacobian,
            hessians,
        }
    }

    /// Multiply everything by the constant `c`.
    pub fn scaled(&self, c: f64) -> Jet2 {
        Jet2 {
            value: &self.value * c,
            jacobian: &self.jacobian * c,
            hessians: self.hessians.iter().map(|h| h * c).collect(),
        }
    }

    /// `Σ_c w_c · H_c` for a covector `w` on the homogeneous coordinates.
    pub fn contract_hessians(&self, w: &[f64]) -> DMatrix<f64> {
        let d = self.param_dim();
        let mut out = DMatrix::zeros(d, d);
        for (hc, &wc) in self.hessians.iter().zip(w) {
            if wc != 0.0 {
                out += hc * wc;
            }
        }
        out
    }

    /// Homogeneous tangent-span matrix: rows `x, ∂₁x, …, ∂_d x`.
    pub fn span_rows(&self) -> DMatrix<f64> {
        let d = self.param_dim();
        let mut s = DMatrix::zeros(d + 1, self.coords());
        s.row_mut(0).copy_from(&self.value.transpose());
        for i in 0..d {
            s.row_mut(i + 1).copy_from(&self.jacobian.column(i).transpose());
        }
        s
    }

    /// Largest ‖H − Hᵀ‖_max over coordinates.
    pub fn hessian_asymmetry(&self) -> f64 {
        self.hessians
            .iter()
            .map(|h| (h - h.transpose()).amax())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_round_trip_preserves_parts() {
        let v = Taylor2::variables(&[0.3, -0.4]);
        let comps = vec![
            v[0].clone() * v[1].clone(),
            v[0].sin() + v[1].clone(),
            v[1].powi(3),
        ];
        let jet = Jet2::from_taylor(&comps);
        let back = Jet2::from_taylor(&jet.to_taylor(2));
        assert_eq!(jet, back);
        assert_eq!(jet.hessian_asymmetry(), 0.0);
    }

    #[test]
    fn transform_is_linear_in_output() {
        let v = Taylor2::variables(&[0.5]);
        let jet = Jet2::from_taylor(&[v[0].clone(), v[0].powi(2)]);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 2.0]);
        let t = jet.transform(&m);
        assert_eq!(t.value[0], 0.75);
        assert_eq!(t.jacobian[(0, 0)], 2.0);
        assert_eq!(t.hessians[1][(0, 0)], 4.0);
    }
}
