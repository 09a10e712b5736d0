use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Expr, Jet2, Taylor2};

/// Points with a homogeneous value below this norm are rejected when sampling.
pub const MIN_VALUE_NORM: f64 = 1e-8;

/// Step used for divided differences of Hessians when a map cannot supply
/// exact jets of its first derivatives.
pub const RICHARDSON_STEP: f64 = 1e-4;

/// A parametrized map from `R^d` into the homogeneous coordinates of `P^N`.
pub trait ChartMap: Send + Sync + fmt::Debug {
    fn param_dim(&self) -> usize;

    /// `N + 1`.
    fn coords(&self) -> usize;

    fn jet(&self, u: &[f64]) -> Jet2;

    fn value(&self, u: &[f64]) -> DVector<f64> {
        self.jet(u).value
    }

    /// Jets of `x` and of each `∂x/∂u^i`, in that order (`d + 1` entries).
    ///
    /// The default differences the exact Hessians of [`ChartMap::jet`] with
    /// one Richardson extrapolation step to obtain the third derivatives.
    fn tangent_jets(&self, u: &[f64]) -> Vec<Jet2> {
        richardson_tangent_jets(self, u)
    }

    fn as_expr(&self) -> Option<&ExprMap> {
        None
    }
}

fn richardson_tangent_jets<M: ChartMap + ?Sized>(map: &M, u: &[f64]) -> Vec<Jet2> {
    let d = map.param_dim();
    let coords = map.coords();
    let base = map.jet(u);
    let h = RICHARDSON_STEP;

    // third[m][c] = ∂_m H_c, approximated per direction m.
    let third: Vec<Vec<DMatrix<f64>>> = (0..d)
        .map(|m| {
            let shifted = |step: f64| {
                let mut p = u.to_vec();
                p[m] += step;
                map.jet(&p).hessians
            };
            let central = |step: f64| -> Vec<DMatrix<f64>> {
                let plus = shifted(step);
                let minus = shifted(-step);
                plus.iter()
                    .zip(&minus)
                    .map(|(a, b)| (a - b) / (2.0 * step))
                    .collect()
            };
            let coarse = central(h);
            let fine = central(0.5 * h);
            coarse
                .iter()
                .zip(&fine)
                .map(|(c, f)| (f * 4.0 - c) / 3.0)
                .collect()
        })
        .collect();

    let mut out = Vec::with_capacity(d + 1);
    out.push(base.clone());
    for i in 0..d {
        let value = base.jacobian.column(i).into_owned();
        let jacobian = DMatrix::from_fn(coords, d, |c, k| base.hessians[c][(i, k)]);
        let hessians = (0..coords)
            .map(|c| {
                let raw = DMatrix::from_fn(d, d, |k, m| third[m][c][(i, k)]);
                (&raw + raw.transpose()) * 0.5
            })
            .collect();
        out.push(Jet2 {
            value,
            jacobian,
            hessians,
        });
    }
    out
}

/// Chart whose raw components are expressions, followed by a fixed linear map
/// into the ambient coordinates.
#[derive(Clone, Debug)]
pub struct ExprMap {
    components: Vec<Expr>,
    /// `(N + 1) × components.len()`; `None` is the identity.
    frame: Option<DMatrix<f64>>,
    /// `derivatives[i][c] = ∂ components[c] / ∂u^i`.
    derivatives: Vec<Vec<Expr>>,
    param_dim: usize,
}

impl ExprMap {
    pub fn new(components: Vec<Expr>, param_dim: usize) -> ExprMap {
        let derivatives = (0..param_dim)
            .map(|i| components.iter().map(|e| e.diff(i)).collect())
            .collect();
        ExprMap {
            components,
            frame: None,
            derivatives,
            param_dim,
        }
    }

    pub fn with_frame(mut self, m: &DMatrix<f64>) -> ExprMap {
        let composed = match &self.frame {
            Some(f) => m * f,
            None => m.clone(),
        };
        self.frame = Some(composed);
        self
    }

    /// Components expressed directly in ambient coordinates.
    pub fn ambient_components(&self) -> Vec<Expr> {
        match &self.frame {
            None => self.components.clone(),
            Some(f) => (0..f.nrows())
                .map(|r| {
                    let row: Vec<f64> = f.row(r).iter().copied().collect();
                    Expr::linear_combination(&row, &self.components)
                })
                .collect(),
        }
    }

    pub fn raw_components(&self) -> &[Expr] {
        &self.components
    }

    pub fn frame(&self) -> Option<&DMatrix<f64>> {
        self.frame.as_ref()
    }

    fn eval_jet(&self, exprs: &[Expr], u: &[f64]) -> Jet2 {
        let vars = Taylor2::variables(u);
        let comps: Vec<Taylor2> = exprs.iter().map(|e| e.eval(&vars)).collect();
        let jet = Jet2::from_taylor(&comps);
        match &self.frame {
            Some(f) => jet.transform(f),
            None => jet,
        }
    }
}

impl ChartMap for ExprMap {
    fn param_dim(&self) -> usize {
        self.param_dim
    }

    fn coords(&self) -> usize {
        self.frame
            .as_ref()
            .map_or(self.components.len(), |f| f.nrows())
    }

    fn jet(&self, u: &[f64]) -> Jet2 {
        self.eval_jet(&self.components, u)
    }

    fn value(&self, u: &[f64]) -> DVector<f64> {
        let raw = DVector::from_iterator(
            self.components.len(),
            self.components.iter().map(|e| e.eval(u)),
        );
        match &self.frame {
            Some(f) => f * raw,
            None => raw,
        }
    }

    fn tangent_jets(&self, u: &[f64]) -> Vec<Jet2> {
        std::iter::once(self.jet(u))
            .chain(self.derivatives.iter().map(|ds| self.eval_jet(ds, u)))
            .collect()
    }

    fn as_expr(&self) -> Option<&ExprMap> {
        Some(self)
    }
}

/// Linear image of an arbitrary chart map.
#[derive(Debug)]
struct LinearImage {
    inner: Arc<dyn ChartMap>,
    matrix: DMatrix<f64>,
}

impl ChartMap for LinearImage {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn coords(&self) -> usize {
        self.matrix.nrows()
    }
    fn jet(&self, u: &[f64]) -> Jet2 {
        self.inner.jet(u).transform(&self.matrix)
    }
    fn value(&self, u: &[f64]) -> DVector<f64> {
        &self.matrix * self.inner.value(u)
    }
    fn tangent_jets(&self, u: &[f64]) -> Vec<Jet2> {
        self.inner
            .tangent_jets(u)
            .iter()
            .map(|j| j.transform(&self.matrix))
            .collect()
    }
}

/// Invariants a chart is expected to exhibit, with where the claim comes from.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ExpectedInvariants {
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub l: Option<usize>,
    pub n_star: Option<usize>,
    pub l_star: Option<usize>,
    pub r_star: Option<usize>,
    pub delta_star: Option<usize>,
    pub source: String,
}

impl ExpectedInvariants {
    pub fn gauss(n: usize, r: usize, source: &str) -> Self {
        ExpectedInvariants {
            n: Some(n),
            r: Some(r),
            l: Some(n - r),
            source: source.to_string(),
            ..Default::default()
        }
    }

    /// Adds the dual invariants of a dually nondegenerate variety in `P^N`.
    pub fn nondegenerate_dual(mut self, ambient: usize) -> Self {
        let (n, r, l) = (self.n.unwrap(), self.r.unwrap(), self.l.unwrap());
        self.n_star = Some(ambient - l - 1);
        self.l_star = (ambient > n).then(|| ambient - n - 1);
        self.r_star = Some(r);
        self.delta_star = Some(0);
        self
    }
}

/// Split of the parameters of a ruled chart: base parameters come first, then
/// leaf parameters in which the chart is affine-linear.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ruling {
    pub base: usize,
    pub leaf: usize,
}

/// A parametrized projective variety.
#[derive(Clone)]
pub struct Chart {
    name: String,
    map: Arc<dyn ChartMap>,
    ruling: Option<Ruling>,
    expected: Option<ExpectedInvariants>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("name", &self.name)
            .field("param_dim", &self.param_dim())
            .field("ambient_dim", &self.ambient_dim())
            .field("ruling", &self.ruling)
            .finish()
    }
}

impl Chart {
    pub fn new(name: impl Into<String>, map: Arc<dyn ChartMap>) -> Chart {
        Chart {
            name: name.into(),
            map,
            ruling: None,
            expected: None,
        }
    }

    pub fn from_exprs(name: impl Into<String>, components: Vec<Expr>, param_dim: usize) -> Chart {
        Chart::new(name, Arc::new(ExprMap::new(components, param_dim)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Chart {
        self.name = name.into();
        self
    }

    pub fn param_dim(&self) -> usize {
        self.map.param_dim()
    }

    /// `N`.
    pub fn ambient_dim(&self) -> usize {
        self.map.coords() - 1
    }

    pub fn map(&self) -> &Arc<dyn ChartMap> {
        &self.map
    }

    pub fn ruling(&self) -> Option<Ruling> {
        self.ruling
    }

    pub fn with_ruling(mut self, ruling: Ruling) -> Chart {
        assert_eq!(ruling.base + ruling.leaf, self.param_dim());
        self.ruling = Some(ruling);
        self
    }

    pub fn expected(&self) -> Option<&ExpectedInvariants> {
        self.expected.as_ref()
    }

    pub fn with_expected(mut self, expected: ExpectedInvariants) -> Chart {
        self.expected = Some(expected);
        self
    }

    pub fn without_expected(mut self) -> Chart {
        self.expected = None;
        self
    }

    pub fn jet(&self, u: &[f64]) -> Result<Jet2> {
        self.check_point(u)?;
        let jet = self.map.jet(u);
        if jet.value.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "{} is not finite at {:?}",
                self.name, u
            )));
        }
        Ok(jet)
    }

    pub fn value(&self, u: &[f64]) -> Result<DVector<f64>> {
        self.check_point(u)?;
        Ok(self.map.value(u))
    }

    pub fn tangent_jets(&self, u: &[f64]) -> Result<Vec<Jet2>> {
        self.check_point(u)?;
        Ok(self.map.tangent_jets(u))
    }

    fn check_point(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.param_dim() {
            return Err(Error::invalid(format!(
                "{} expects {} parameters, got {}",
                self.name,
                self.param_dim(),
                u.len()
            )));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite parameter"));
        }
        Ok(())
    }

    /// Compose with a linear map `M` of the homogeneous coordinates.
    /// Ruling is kept; expected invariants are kept only for invertible maps,
    /// which the caller is responsible for.
    pub fn transformed(&self, m: &DMatrix<f64>) -> Chart {
        assert_eq!(m.ncols(), self.map.coords());
        let map: Arc<dyn ChartMap> = match self.map.as_expr() {
            Some(e) => Arc::new(e.clone().with_frame(m)),
            None => Arc::new(LinearImage {
                inner: self.map.clone(),
                matrix: m.clone(),
            }),
        };
        Chart {
            name: self.name.clone(),
            map,
            ruling: self.ruling,
            expected: self.expected.clone(),
        }
    }

    /// Multiply the homogeneous output by a scalar expression in the
    /// parameters. Only available for expression charts.
    pub fn rescaled(&self, factor: &Expr) -> Result<Chart> {
        let e = self
            .map
            .as_expr()
            .ok_or_else(|| Error::invalid("rescaling needs an expression chart"))?;
        let comps = e
            .raw_components()
            .iter()
            .map(|c| c.clone() * factor.clone())
            .collect();
        let mut map = ExprMap::new(comps, self.param_dim());
        if let Some(f) = e.frame() {
            map = map.with_frame(f);
        }
        Ok(Chart {
            name: self.name.clone(),
            map: Arc::new(map),
            ruling: None,
            expected: self.expected.clone(),
        })
    }

    /// Ambient components as expressions, when the chart is expression based.
    pub fn ambient_exprs(&self) -> Option<Vec<Expr>> {
        self.map.as_expr().map(ExprMap::ambient_components)
    }

    /// Uniform point of `[-1, 1]^d` with a non-negligible homogeneous value.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        for _ in 0..1000 {
            let u: Vec<f64> = (0..self.param_dim())
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect();
            let v = self.map.value(&u);
            if v.iter().all(|c| c.is_finite()) && v.norm() >= MIN_VALUE_NORM {
                return Ok(u);
            }
        }
        Err(Error::precondition(format!(
            "{}: no sample with nonzero value found",
            self.name
        )))
    }
}

/// A chart with an explicit base/leaf parameter split.
#[derive(Clone, Debug)]
pub struct RuledChart(Chart);

impl RuledChart {
    pub fn chart(&self) -> &Chart {
        &self.0
    }

    pub fn into_chart(self) -> Chart {
        self.0
    }

    pub fn ruling(&self) -> Ruling {
        self.0.ruling.expect("ruled chart")
    }

    pub fn base_count(&self) -> usize {
        self.ruling().base
    }

    pub fn leaf_count(&self) -> usize {
        self.ruling().leaf
    }
}

impl TryFrom<Chart> for RuledChart {
    type Error = Error;
    fn try_from(chart: Chart) -> Result<RuledChart> {
        if chart.ruling.is_some() {
            Ok(RuledChart(chart))
        } else {
            Err(Error::precondition(format!(
                "{} has no declared leaf parameters",
                chart.name
            )))
        }
    }
}

impl std::ops::Deref for RuledChart {
    type Target = Chart;
    fn deref(&self) -> &Chart {
        &self.0
    }
}
