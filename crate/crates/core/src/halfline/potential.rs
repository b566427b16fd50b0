use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{QuadratureGrid, WeightKind};
use crate::numerics::{C64, ZERO};

type Eval = Arc<dyn Fn(f64) -> C64 + Send + Sync>;
type Tail = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Integrable potential on (0, ∞), truncated at `x_max`.
#[derive(Clone)]
pub struct Potential1D {
    eval: Eval,
    tail: Tail,
    pub x_max: f64,
    pub breakpoints: Vec<f64>,
    pub l1_tail_bound: f64,
    pub real_valued: bool,
    pub label: String,
}

impl fmt::Debug for Potential1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential1D")
            .field("label", &self.label)
            .field("x_max", &self.x_max)
            .field("breakpoints", &self.breakpoints)
            .field("l1_tail_bound", &self.l1_tail_bound)
            .finish()
    }
}

impl Potential1D {
    /// General constructor. `tail(x)` must bound ∫_x^∞ |V|.
    pub fn custom(
        label: impl Into<String>,
        eval: impl Fn(f64) -> C64 + Send + Sync + 'static,
        tail: impl Fn(f64) -> f64 + Send + Sync + 'static,
        x_max: f64,
        breakpoints: Vec<f64>,
        real_valued: bool,
    ) -> Result<Self> {
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::Parameter(format!(
                "x_max must be positive, got {x_max}"
            )));
        }
        let mut breakpoints: Vec<f64> = breakpoints
            .into_iter()
            .filter(|b| *b > 0.0 && *b < x_max)
            .collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let tail: Tail = Arc::new(tail);
        let l1_tail_bound = tail(x_max);
        if !(l1_tail_bound >= 0.0) {
            return Err(Error::Parameter("tail bound must be non-negative".into()));
        }
        let p = Self {
            eval: Arc::new(eval),
            tail,
            x_max,
            breakpoints,
            l1_tail_bound,
            real_valued,
            label: label.into(),
        };
        p.l1_norm()?;
        Ok(p)
    }

    pub fn zero(x_max: f64) -> Result<Self> {
        Self::custom("zero", |_| ZERO, |_| 0.0, x_max, vec![], true)
    }

    /// V(x) = amplitude·e^{−rate·x}.
    pub fn exponential(amplitude: f64, rate: f64, x_max: f64) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(Error::Parameter("exponential rate must be positive".into()));
        }
        Self::custom(
            format!("{amplitude}*exp(-{rate}*x)"),
            move |x| C64::new(amplitude * (-rate * x).exp(), 0.0),
            move |x| amplitude.abs() * (-rate * x).exp() / rate,
            x_max,
            vec![],
            true,
        )
    }

    /// V = −depth on (0, width), zero beyond.
    pub fn square_well(depth: f64, width: f64, x_max: f64) -> Result<Self> {
        if !(width > 0.0) || width > x_max {
            return Err(Error::Parameter("well width must lie in (0, x_max]".into()));
        }
        Self::custom(
            format!("-{depth}*1(0,{width})"),
            move |x| {
                if x < width {
                    C64::new(-depth, 0.0)
                } else {
                    ZERO
                }
            },
            |_| 0.0,
            x_max,
            vec![width],
            true,
        )
    }

    /// Piecewise-linear interpolation of samples, constant before the first
    /// abscissa and zero after the last.
    pub fn table(xs: Vec<f64>, values: Vec<C64>, x_max: f64) -> Result<Self> {
        validate_table(&xs, &values)?;
        let last = *xs.last().unwrap();
        let x_max = x_max.max(last);
        let real = values.iter().all(|v| v.im == 0.0);
        let xs = Arc::new(xs);
        let values = Arc::new(values);
        let (xe, ve) = (xs.clone(), values.clone());
        Self::custom(
            "table",
            move |x| interpolate(&xe, &ve, x),
            |_| 0.0,
            x_max,
            vec![last, xs[0]],
            real,
        )
    }

    pub fn eval(&self, x: f64) -> C64 {
        (self.eval)(x)
    }

    /// Bound on ∫_x^∞ |V|.
    pub fn tail_bound(&self, x: f64) -> f64 {
        (self.tail)(x)
    }

    /// Same potential truncated elsewhere.
    pub fn with_x_max(&self, x_max: f64) -> Result<Self> {
        let mut p = self.clone();
        if !(x_max > 0.0) {
            return Err(Error::Parameter("x_max must be positive".into()));
        }
        p.x_max = x_max;
        p.l1_tail_bound = (self.tail)(x_max);
        p.breakpoints.retain(|b| *b < x_max);
        Ok(p)
    }

    /// Fails with a truncation error when the tail exceeds `budget`.
    pub fn check_tail(&self, budget: f64) -> Result<()> {
        if self.l1_tail_bound <= budget {
            return Ok(());
        }
        let mut x = self.x_max;
        for _ in 0..60 {
            x *= 1.25;
            if (self.tail)(x) <= budget {
                break;
            }
        }
        Err(Error::Truncation {
            tail: self.l1_tail_bound,
            suggested_x_max: x,
        })
    }

    /// Panels on (0, x_max) split at breakpoints, `n` equal pieces otherwise.
    pub fn panel_edges(&self, n: usize) -> Vec<f64> {
        let mut edges: Vec<f64> = (0..=n).map(|p| self.x_max * p as f64 / n as f64).collect();
        edges.extend(self.breakpoints.iter().copied());
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * self.x_max);
        edges
    }

    /// ∫_0^{x_max} |V| by composite Gauss–Legendre.
    pub fn l1_norm(&self) -> Result<f64> {
        let g = QuadratureGrid::from_edges(&self.panel_edges(32), 16, WeightKind::Lebesgue)?;
        let norm = g.integrate(|x| self.eval(x).norm());
        if norm.is_finite() {
            Ok(norm)
        } else {
            Err(Error::Parameter(format!(
                "potential '{}' is not integrable on (0, x_max)",
                self.label
            )))
        }
    }

    pub fn factorize(&self) -> FactorizedPotential {
        FactorizedPotential {
            potential: self.clone(),
        }
    }
}

pub(crate) fn validate_table(xs: &[f64], values: &[C64]) -> Result<()> {
    if xs.len() < 2 || xs.len() != values.len() {
        return Err(Error::Parameter(
            "table needs at least two samples with matching columns".into(),
        ));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) || xs[0] < 0.0 {
        return Err(Error::Parameter(
            "table abscissae must be non-negative and strictly increasing".into(),
        ));
    }
    if values
        .iter()
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
        || xs.iter().any(|x| !x.is_finite())
    {
        return Err(Error::Parameter("table entries must be finite".into()));
    }
    Ok(())
}

pub(crate) fn interpolate(xs: &[f64], vs: &[C64], x: f64) -> C64 {
    let n = xs.len();
    if x <= xs[0] {
        return vs[0];
    }
    if x > xs[n - 1] {
        return ZERO;
    }
    let j = xs.partition_point(|&t| t < x).clamp(1, n - 1);
    let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    vs[j - 1] * (1.0 - t) + vs[j] * t
}

/// V = u·v with v = |V|^{1/2} and u = e^{i arg V}|V|^{1/2}.
#[derive(Clone, Debug)]
pub struct FactorizedPotential {
    potential: Potential1D,
}

impl FactorizedPotential {
    pub fn u(&self, x: f64) -> C64 {
        split(self.potential.eval(x)).0
    }

    pub fn v(&self, x: f64) -> C64 {
        split(self.potential.eval(x)).1
    }
}

/// (u, v) factors of a single value.
pub fn split(value: C64) -> (C64, C64) {
    let r = value.norm();
    if r == 0.0 {
        return (ZERO, ZERO);
    }
    let s = r.sqrt();
    (value / s, C64::new(s, 0.0))
}
