use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::halfline::potential::{interpolate, validate_table};
use crate::numerics::quadrature::{QuadratureGrid, WeightKind};
use crate::numerics::{C64, ZERO};

type Eval = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Radially symmetric potential V(r) on the disk of radius `radius`.
#[derive(Clone)]
pub struct RadialPotential2D {
    eval: Eval,
    pub radius: f64,
    pub breakpoints: Vec<f64>,
    pub p_exponent: f64,
    pub real_valued: bool,
    pub label: String,
}

impl fmt::Debug for RadialPotential2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialPotential2D")
            .field("label", &self.label)
            .field("radius", &self.radius)
            .field("breakpoints", &self.breakpoints)
            .field("p_exponent", &self.p_exponent)
            .finish()
    }
}

impl RadialPotential2D {
    pub fn custom(
        label: impl Into<String>,
        eval: impl Fn(f64) -> C64 + Send + Sync + 'static,
        radius: f64,
        breakpoints: Vec<f64>,
        p_exponent: f64,
        real_valued: bool,
    ) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Parameter(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        if !(p_exponent > 4.0 / 3.0 && p_exponent <= 2.0) {
            return Err(Error::Parameter(format!(
                "integrability exponent {p_exponent} outside (4/3, 2]"
            )));
        }
        let mut breakpoints: Vec<f64> = breakpoints
            .into_iter()
            .filter(|b| *b > 0.0 && *b < radius)
            .collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        let p = Self {
            eval: Arc::new(eval),
            radius,
            breakpoints,
            p_exponent,
            real_valued,
            label: label.into(),
        };
        p.lp_norm()?;
        Ok(p)
    }

    pub fn zero(radius: f64) -> Result<Self> {
        Self::custom("zero", |_| ZERO, radius, vec![], 2.0, true)
    }

    /// V(r) = amplitude·exp(−(r/width)²).
    pub fn gaussian(amplitude: f64, width: f64, radius: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Parameter("gaussian width must be positive".into()));
        }
        Self::custom(
            format!("{amplitude}*exp(-(r/{width})^2)"),
            move |r| C64::new(amplitude * (-(r / width).powi(2)).exp(), 0.0),
            radius,
            vec![],
            2.0,
            true,
        )
    }

    /// Piecewise-linear samples in r, constant before the first sample and
    /// zero after the last.
    pub fn table(rs: Vec<f64>, values: Vec<C64>, radius: f64) -> Result<Self> {
        validate_table(&rs, &values)?;
        let real = values.iter().all(|v| v.im == 0.0);
        let bps = vec![rs[0], *rs.last().unwrap()];
        Self::custom(
            "table",
            move |r| interpolate(&rs, &values, r),
            radius,
            bps,
            2.0,
            real,
        )
    }

    pub fn eval(&self, r: f64) -> C64 {
        (self.eval)(r)
    }

    /// Scaled copy ε·V.
    pub fn scaled(&self, eps: f64) -> Self {
        let inner = self.eval.clone();
        Self {
            eval: Arc::new(move |r| eps * inner(r)),
            label: format!("{eps}*({})", self.label),
            ..self.clone()
        }
    }

    /// Panel edges on (0, R) at `n` equal pieces plus breakpoints.
    pub fn panel_edges(&self, n: usize) -> Vec<f64> {
        let mut edges: Vec<f64> = (0..=n).map(|p| self.radius * p as f64 / n as f64).collect();
        edges.extend(self.breakpoints.iter().copied());
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * self.radius);
        edges
    }

    /// Radial grid with `n` base panels.
    pub fn grid(&self, n_panels: usize, nodes_per_panel: usize) -> Result<QuadratureGrid> {
        QuadratureGrid::from_edges(
            &self.panel_edges(n_panels),
            nodes_per_panel,
            WeightKind::Radial,
        )
    }

    /// (∫_0^R |V|^p r dr)^{1/p}.
    pub fn lp_norm(&self) -> Result<f64> {
        let g = self.grid(32, 16)?;
        let p = self.p_exponent;
        let s = g.integrate(|r| self.eval(r).norm().powf(p));
        if s.is_finite() {
            Ok(s.powf(1.0 / p))
        } else {
            Err(Error::Parameter(format!(
                "potential '{}' is not in L^{p}(r dr)",
                self.label
            )))
        }
    }
}
