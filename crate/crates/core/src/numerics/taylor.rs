//! Truncated second-order multivariate Taylor arithmetic.
//!
//! A [`Taylor2`] carries a value, its gradient and its (symmetric) Hessian with
//! respect to a fixed set of `dim` seed variables. Arithmetic propagates all
//! three exactly up to rounding; the Hessian is assembled from its upper
//! triangle and mirrored, so it is symmetric bit for bit.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar type that chart expressions can be evaluated over.
pub trait Scalar:
    Clone
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant living in the same variable space as `self`.
    fn constant_like(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn recip(&self) -> Self;

    fn powi(&self, n: u32) -> Self {
        match n {
            0 => self.constant_like(1.0),
            1 => self.clone(),
            _ => {
                let half = self.powi(n / 2);
                let sq = half.clone() * half;
                if n % 2 == 1 {
                    sq * self.clone()
                } else {
                    sq
                }
            }
        }
    }
}

impl Scalar for f64 {
    fn constant_like(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn recip(&self) -> Self {
        1.0 / self
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Taylor2 {
    value: f64,
    grad: Vec<f64>,
    /// Row-major `dim × dim`.
    hess: Vec<f64>,
}

impl Taylor2 {
    pub fn constant(value: f64, dim: usize) -> Self {
        Taylor2 {
            value,
            grad: vec![0.0; dim],
            hess: vec![0.0; dim * dim],
        }
    }

    /// The seed variable `index` evaluated at `value`.
    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut t = Taylor2::constant(value, dim);
        t.grad[index] = 1.0;
        t
    }

    /// Seeds for every coordinate of `point`.
    pub fn variables(point: &[f64]) -> Vec<Taylor2> {
        let dim = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Taylor2::variable(v, i, dim))
            .collect()
    }

    /// Assemble from explicit parts. The Hessian is symmetrized.
    pub fn from_parts(value: f64, grad: Vec<f64>, hess: Vec<f64>) -> Self {
        let dim = grad.len();
        assert_eq!(hess.len(), dim * dim, "hessian size mismatch");
        let mut t = Taylor2 { value, grad, hess };
        for i in 0..dim {
            for j in (i + 1)..dim {
                let m = 0.5 * (t.hess[i * dim + j] + t.hess[j * dim + i]);
                t.hess[i * dim + j] = m;
                t.hess[j * dim + i] = m;
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[i * self.dim() + j]
    }

    /// Re-express in a larger variable space whose first `self.dim()`
    /// variables coincide with the current ones.
    pub fn embed(&self, dim: usize) -> Taylor2 {
        let d = self.dim();
        assert!(dim >= d);
        let mut out = Taylor2::constant(self.value, dim);
        out.grad[..d].copy_from_slice(&self.grad);
        for i in 0..d {
            out.hess[i * dim..i * dim + d].copy_from_slice(&self.hess[i * d..i * d + d]);
        }
        out
    }

    /// `f(self)` for a scalar function with derivatives `f0, f1, f2` at `self.value`.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Taylor2 {
        let d = self.dim();
        let mut out = Taylor2::constant(f0, d);
        for i in 0..d {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..d {
            for j in i..d {
                let h = f1 * self.hess[i * d + j] + f2 * self.grad[i] * self.grad[j];
                out.hess[i * d + j] = h;
                out.hess[j * d + i] = h;
            }
        }
        out
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &Taylor2, c: f64) {
        self.check_dim(other);
        self.value += c * other.value;
        self.grad.iter_mut().zip(&other.grad).for_each(|(a, b)| *a += c * b);
        self.hess.iter_mut().zip(&other.hess).for_each(|(a, b)| *a += c * b);
    }

    /// `self += a · b` without temporaries.
    pub fn add_product(&mut self, a: &Taylor2, b: &Taylor2) {
        self.check_dim(a);
        self.check_dim(b);
        let d = self.dim();
        self.value += a.value * b.value;
        for i in 0..d {
            self.grad[i] += a.grad[i] * b.value + a.value * b.grad[i];
        }
        for i in 0..d {
            for j in i..d {
                let h = a.hess[i * d + j] * b.value
                    + a.value * b.hess[i * d + j]
                    + a.grad[i] * b.grad[j]
                    + a.grad[j] * b.grad[i];
                self.hess[i * d + j] += h;
                if j != i {
                    self.hess[j * d + i] += h;
                }
            }
        }
    }

    fn check_dim(&self, other: &Taylor2) {
        assert_eq!(self.dim(), other.dim(), "Taylor2 dimension mismatch");
    }
}

impl Add for Taylor2 {
    type Output = Taylor2;
    fn add(mut self, rhs: Taylor2) -> Taylor2 {
        self.check_dim(&rhs);
        self.value += rhs.value;
        self.grad.iter_mut().zip(&rhs.grad).for_each(|(a, b)| *a += b);
        self.hess.iter_mut().zip(&rhs.hess).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Taylor2 {
    type Output = Taylor2;
    fn sub(mut self, rhs: Taylor2) -> Taylor2 {
        self.check_dim(&rhs);
        self.value -= rhs.value;
        self.grad.iter_mut().zip(&rhs.grad).for_each(|(a, b)| *a -= b);
        self.hess.iter_mut().zip(&rhs.hess).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Neg for Taylor2 {
    type Output = Taylor2;
    fn neg(mut self) -> Taylor2 {
        self.value = -self.value;
        self.grad.iter_mut().for_each(|a| *a = -*a);
        self.hess.iter_mut().for_each(|a| *a = -*a);
        self
    }
}

impl Mul for Taylor2 {
    type Output = Taylor2;
    fn mul(self, rhs: Taylor2) -> Taylor2 {
        self.check_dim(&rhs);
        let d = self.dim();
        let (a, b) = (&self, &rhs);
        let mut out = Taylor2::constant(a.value * b.value, d);
        for i in 0..d {
            out.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
        }
        for i in 0..d {
            for j in i..d {
                let h = a.hess[i * d + j] * b.value
                    + a.value * b.hess[i * d + j]
                    + a.grad[i] * b.grad[j]
                    + a.grad[j] * b.grad[i];
                out.hess[i * d + j] = h;
                out.hess[j * d + i] = h;
            }
        }
        out
    }
}

impl Div for Taylor2 {
    type Output = Taylor2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Taylor2) -> Taylor2 {
        self * rhs.recip()
    }
}

impl Scalar for Taylor2 {
    fn constant_like(&self, c: f64) -> Self {
        Taylor2::constant(c, self.dim())
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.value *= c;
        out.grad.iter_mut().for_each(|a| *a *= c);
        out.hess.iter_mut().for_each(|a| *a *= c);
        out
    }
    fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
    fn powi(&self, n: u32) -> Self {
        match n {
            0 => self.constant_like(1.0),
            1 => self.clone(),
            _ => {
                let v = self.value;
                let nf = n as f64;
                self.chain(
                    v.powi(n as i32),
                    nf * v.powi(n as i32 - 1),
                    nf * (nf - 1.0) * v.powi(n as i32 - 2),
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_matches_hand_derivatives() {
        // f(x, y) = x^2 y at (2, 3)
        let v = Taylor2::variables(&[2.0, 3.0]);
        let f = v[0].clone() * v[0].clone() * v[1].clone();
        assert_eq!(f.value(), 12.0);
        assert_eq!(f.grad(), &[12.0, 4.0]);
        assert_eq!(f.hess(0, 0), 6.0);
        assert_eq!(f.hess(0, 1), 4.0);
        assert_eq!(f.hess(1, 0), 4.0);
        assert_eq!(f.hess(1, 1), 0.0);
    }

    #[test]
    fn reciprocal_and_trig() {
        let v = Taylor2::variables(&[0.5]);
        let r = v[0].recip();
        assert!((r.grad()[0] + 4.0).abs() < 1e-14);
        assert!((r.hess(0, 0) - 16.0).abs() < 1e-12);
        let s = v[0].sin();
        assert!((s.hess(0, 0) + 0.5f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn powi_agrees_with_repeated_product() {
        let v = Taylor2::variables(&[0.7, -1.3]);
        let x = v[0].clone() + v[1].clone() * v[0].clone();
        let p = x.powi(4);
        let q = x.clone() * x.clone() * x.clone() * x.clone();
        assert!((p.value() - q.value()).abs() < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.hess(i, j) - q.hess(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn embed_pads_with_zeros() {
        let v = Taylor2::variables(&[1.0, 2.0]);
        let f = v[0].clone() * v[1].clone();
        let e = f.embed(3);
        assert_eq!(e.grad(), &[2.0, 1.0, 0.0]);
        assert_eq!(e.hess(0, 1), 1.0);
        assert_eq!(e.hess(2, 2), 0.0);
    }
}
