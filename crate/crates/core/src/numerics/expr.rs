//! Expression grammar for chart components: polynomials, sines and cosines,
//! and reciprocals. Expressions evaluate over any [`Scalar`] and can be
//! differentiated symbolically, which is how charts supply exact jets of their
//! own first derivatives.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::taylor::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Sum(Arc<[Expr]>),
    Product(Arc<[Expr]>),
    Neg(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Pow(Arc<Expr>, u32),
    Recip(Arc<Expr>),
}

impl Expr {
    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn one() -> Expr {
        Expr::Const(1.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = 0.0;
        let mut rest = Vec::new();
        for t in terms {
            match t {
                Expr::Const(c) => constant += c,
                Expr::Sum(inner) => {
                    for e in inner.iter() {
                        match e {
                            Expr::Const(c) => constant += c,
                            other => rest.push(other.clone()),
                        }
                    }
                }
                other => rest.push(other),
            }
        }
        if constant != 0.0 {
            rest.push(Expr::Const(constant));
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Expr::Sum(rest.into()),
        }
    }

    pub fn product(factors: impl IntoIterator<Item = Expr>) -> Expr {
        let mut constant = 1.0;
        let mut rest = Vec::new();
        for f in factors {
            match f {
                Expr::Const(c) => constant *= c,
                Expr::Product(inner) => {
                    for e in inner.iter() {
                        match e {
                            Expr::Const(c) => constant *= c,
                            other => rest.push(other.clone()),
                        }
                    }
                }
                other => rest.push(other),
            }
        }
        if constant == 0.0 {
            return Expr::zero();
        }
        if constant != 1.0 {
            rest.insert(0, Expr::Const(constant));
        }
        match rest.len() {
            0 => Expr::one(),
            1 => rest.pop().unwrap(),
            _ => Expr::Product(rest.into()),
        }
    }

    pub fn sin(self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::Const(c.sin()),
            None => Expr::Sin(Arc::new(self)),
        }
    }

    pub fn cos(self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::Const(c.cos()),
            None => Expr::Cos(Arc::new(self)),
        }
    }

    pub fn pow(self, n: u32) -> Expr {
        match (n, self.as_const()) {
            (0, _) => Expr::one(),
            (1, _) => self,
            (_, Some(c)) => Expr::Const(c.powi(n as i32)),
            _ => Expr::Pow(Arc::new(self), n),
        }
    }

    pub fn recip(self) -> Expr {
        match self.as_const() {
            Some(c) => Expr::Const(1.0 / c),
            None => Expr::Recip(Arc::new(self)),
        }
    }

    /// `Σ_j coeffs[j] · exprs[j]`, dropping exact zeros.
    pub fn linear_combination(coeffs: &[f64], exprs: &[Expr]) -> Expr {
        Expr::sum(
            coeffs
                .iter()
                .zip(exprs)
                .filter(|(c, e)| **c != 0.0 && !e.is_zero())
                .map(|(&c, e)| Expr::product([Expr::Const(c), e.clone()])),
        )
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Sum(ts) | Expr::Product(ts) => ts.iter().filter_map(Expr::max_var).max(),
            Expr::Neg(e) | Expr::Sin(e) | Expr::Cos(e) | Expr::Pow(e, _) | Expr::Recip(e) => {
                e.max_var()
            }
        }
    }

    /// Substitute expressions for variables.
    pub fn substitute(&self, vars: &[Expr]) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| t.substitute(vars))),
            Expr::Product(ts) => Expr::product(ts.iter().map(|t| t.substitute(vars))),
            Expr::Neg(e) => -e.substitute(vars),
            Expr::Sin(e) => e.substitute(vars).sin(),
            Expr::Cos(e) => e.substitute(vars).cos(),
            Expr::Pow(e, n) => e.substitute(vars).pow(*n),
            Expr::Recip(e) => e.substitute(vars).recip(),
        }
    }

    pub fn diff(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(i) => Expr::Const(if *i == var { 1.0 } else { 0.0 }),
            Expr::Sum(ts) => Expr::sum(ts.iter().map(|t| t.diff(var))),
            Expr::Product(fs) => Expr::sum((0..fs.len()).map(|k| {
                let dk = fs[k].diff(var);
                if dk.is_zero() {
                    return Expr::zero();
                }
                Expr::product(
                    fs.iter()
                        .enumerate()
                        .map(|(j, f)| if j == k { dk.clone() } else { f.clone() }),
                )
            })),
            Expr::Neg(e) => -e.diff(var),
            Expr::Sin(e) => Expr::product([e.as_ref().clone().cos(), e.diff(var)]),
            Expr::Cos(e) => -Expr::product([e.as_ref().clone().sin(), e.diff(var)]),
            Expr::Pow(e, n) => Expr::product([
                Expr::Const(*n as f64),
                e.as_ref().clone().pow(n - 1),
                e.diff(var),
            ]),
            Expr::Recip(e) => -Expr::product([e.diff(var), e.as_ref().clone().pow(2).recip()]),
        }
    }

    /// Evaluate over any scalar. `vars` must be non-empty so constants can be
    /// lifted into the same variable space.
    pub fn eval<S: Scalar>(&self, vars: &[S]) -> S {
        match self {
            Expr::Const(c) => vars[0].constant_like(*c),
            Expr::Var(i) => vars[*i].clone(),
            Expr::Sum(ts) => {
                let mut acc = ts[0].eval(vars);
                for t in &ts[1..] {
                    acc = acc + t.eval(vars);
                }
                acc
            }
            Expr::Product(fs) => {
                let mut it = fs.iter();
                let first = it.next().expect("non-empty product");
                let mut acc = first.eval(vars);
                for f in it {
                    match f {
                        Expr::Const(c) => acc = acc.scale(*c),
                        other => acc = acc * other.eval(vars),
                    }
                }
                acc
            }
            Expr::Neg(e) => -e.eval(vars),
            Expr::Sin(e) => e.eval(vars).sin(),
            Expr::Cos(e) => e.eval(vars).cos(),
            Expr::Pow(e, n) => e.eval(vars).powi(*n),
            Expr::Recip(e) => e.eval(vars).recip(),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum([self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum([self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product([self, rhs])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(e) => e.as_ref().clone(),
            other => Expr::product([Expr::Const(-1.0), other]),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, ts: &[Expr], sep: &str) -> fmt::Result {
            write!(f, "(")?;
            for (k, t) in ts.iter().enumerate() {
                if k > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{t}")?;
            }
            write!(f, ")")
        }
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "u{i}"),
            Expr::Sum(ts) => join(f, ts, " + "),
            Expr::Product(ts) => join(f, ts, "*"),
            Expr::Neg(e) => write!(f, "-{e}"),
            Expr::Sin(e) => write!(f, "sin{e}"),
            Expr::Cos(e) => write!(f, "cos{e}"),
            Expr::Pow(e, n) => write!(f, "{e}^{n}"),
            Expr::Recip(e) => write!(f, "1/{e}"),
        }
    }
}
