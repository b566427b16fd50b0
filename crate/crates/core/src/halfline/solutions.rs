use std::sync::Arc;

use super::{green::nystrom_grid, Bc, Potential1D, SpectralPoint};
use crate::error::{finite, Error, Result};
use crate::numerics::ode::{
    integrate, ode_outgoing_with_stops, ode_second_order_with_stops, SecondOrderSolution,
};
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::{C64, I, ONE, ZERO};
use crate::settings::Settings;

/// Tail budget for the Jost asymptotics.
pub const TAIL_BUDGET: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    RegularDirichlet,
    RegularNeumann,
    Jost,
}

/// A solution of −ψ'' + (V − z)ψ = 0 sampled on a grid, with dense output.
#[derive(Debug, Clone)]
pub struct SolutionSample {
    pub grid: QuadratureGrid,
    pub values: Vec<C64>,
    pub derivatives: Vec<C64>,
    pub value_at_0: C64,
    pub derivative_at_0: C64,
    pub kind: SolutionKind,
    pub point: SpectralPoint,
    dense: Arc<SecondOrderSolution>,
}

impl SolutionSample {
    fn from_dense(
        dense: SecondOrderSolution,
        grid: QuadratureGrid,
        kind: SolutionKind,
        point: SpectralPoint,
    ) -> Result<Self> {
        let (values, derivatives): (Vec<C64>, Vec<C64>) =
            grid.nodes.iter().map(|&x| dense.eval(x)).unzip();
        let (value_at_0, derivative_at_0) = dense.eval(0.0);
        finite(value_at_0, "solution")?;
        finite(derivative_at_0, "solution")?;
        if values
            .iter()
            .chain(&derivatives)
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite("solution"));
        }
        Ok(Self {
            grid,
            values,
            derivatives,
            value_at_0,
            derivative_at_0,
            kind,
            point,
            dense: Arc::new(dense),
        })
    }

    /// (ψ(x), ψ'(x)) anywhere in [0, x_max].
    pub fn eval(&self, x: f64) -> (C64, C64) {
        self.dense.eval(x)
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(self.value_at_0.norm(), f64::max)
    }

    /// Largest residual of the defining Volterra equation on the grid,
    /// relative to max|ψ|.
    pub fn volterra_residual(&self, v: &Potential1D) -> f64 {
        let k = self.point.sqrt_z;
        let g = &self.grid;
        let n = g.len();
        let npp = g.nodes_per_panel;
        let s = g.reference_rule().cumulative_matrix();
        let vpsi: Vec<C64> = (0..n)
            .map(|j| v.eval(g.nodes[j]) * self.values[j])
            .collect();
        let kern = |t: f64| (k * t).sin() / k;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let xi = g.nodes[i];
            let p = g.panel_of(i);
            let (l, r) = g.panels[p];
            let half = 0.5 * (r - l);
            let ii = i - p * npp;
            let mut integral = ZERO;
            let base = match self.kind {
                SolutionKind::RegularDirichlet => kern(xi),
                SolutionKind::RegularNeumann => (k * xi).cos(),
                SolutionKind::Jost => (I * k * xi).exp(),
            };
            match self.kind {
                SolutionKind::Jost => {
                    for j in (p + 1) * npp..n {
                        integral += g.weights[j] * kern(g.nodes[j] - xi) * vpsi[j];
                    }
                    for jj in 0..npp {
                        let j = p * npp + jj;
                        integral += (g.weights[j] - half * s[ii * npp + jj])
                            * kern(g.nodes[j] - xi)
                            * vpsi[j];
                    }
                }
                _ => {
                    for j in 0..p * npp {
                        integral += g.weights[j] * kern(xi - g.nodes[j]) * vpsi[j];
                    }
                    for jj in 0..npp {
                        let j = p * npp + jj;
                        integral += half * s[ii * npp + jj] * kern(xi - g.nodes[j]) * vpsi[j];
                    }
                }
            }
            worst = worst.max((self.values[i] - base - integral).norm());
        }
        worst / self.max_abs().max(1e-300)
    }

    /// Largest |ψ'' − (V − z)ψ| on the grid, relative to max|ψ|, with ψ''
    /// from spectral differentiation of the sampled derivative.
    pub fn collocation_residual(&self, v: &Potential1D) -> f64 {
        let g = &self.grid;
        let npp = g.nodes_per_panel;
        let d = g.reference_rule().differentiation_matrix();
        let mut worst: f64 = 0.0;
        for (p, &(l, r)) in g.panels.iter().enumerate() {
            let half = 0.5 * (r - l);
            for ii in 0..npp {
                let i = p * npp + ii;
                let second: C64 = (0..npp)
                    .map(|jj| d[ii * npp + jj] * self.derivatives[p * npp + jj])
                    .sum::<C64>()
                    / half;
                let want = (v.eval(g.nodes[i]) - self.point.z) * self.values[i];
                worst = worst.max((second - want).norm());
            }
        }
        worst / self.max_abs().max(1e-300)
    }
}

/// Grid on which solutions are sampled; identical to the first Nyström level.
pub fn sample_grid(
    v: &Potential1D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<QuadratureGrid> {
    nystrom_grid(
        v,
        pt,
        settings.policy.n_panels,
        settings.policy.nodes_per_panel,
    )
}

fn propagate(
    v: &Potential1D,
    pt: &SpectralPoint,
    span: (f64, f64),
    init: (C64, C64),
    settings: &Settings,
) -> Result<SecondOrderSolution> {
    settings.validate()?;
    let z = pt.z;
    ode_second_order_with_stops(
        |x| v.eval(x) - z,
        span,
        init,
        settings.ode_tol,
        &v.breakpoints,
    )
}

/// φ with φ(0) = 0, φ'(0) = 1.
pub fn regular_solution_dirichlet(
    v: &Potential1D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<SolutionSample> {
    let dense = propagate(v, pt, (0.0, v.x_max), (ZERO, ONE), settings)?;
    SolutionSample::from_dense(
        dense,
        sample_grid(v, pt, settings)?,
        SolutionKind::RegularDirichlet,
        *pt,
    )
}

/// θ with θ(0) = 1, θ'(0) = 0.
pub fn regular_solution_neumann(
    v: &Potential1D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<SolutionSample> {
    let dense = propagate(v, pt, (0.0, v.x_max), (ONE, ZERO), settings)?;
    SolutionSample::from_dense(
        dense,
        sample_grid(v, pt, settings)?,
        SolutionKind::RegularNeumann,
        *pt,
    )
}

/// Jost solution, integrated backward from e^{ik x_max} in the gauge
/// f e^{−ikx}.
pub fn jost_solution(
    v: &Potential1D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<SolutionSample> {
    v.check_tail(TAIL_BUDGET)?;
    settings.validate()?;
    let dense = ode_outgoing_with_stops(
        |x| v.eval(x),
        pt.sqrt_z,
        (v.x_max, 0.0),
        settings.ode_tol,
        &v.breakpoints,
    )?;
    SolutionSample::from_dense(
        dense,
        sample_grid(v, pt, settings)?,
        SolutionKind::Jost,
        *pt,
    )
}

/// W(f, g)(x) = f g' − f' g.
pub fn wronskian(f: &SolutionSample, g: &SolutionSample, x: f64) -> Result<C64> {
    if f.grid.nodes != g.grid.nodes {
        return Err(Error::Parameter(
            "solutions are sampled on different grids".into(),
        ));
    }
    if !(0.0..=f.grid.b()).contains(&x) {
        return Err(Error::Parameter(format!(
            "x = {x} outside the sampled range"
        )));
    }
    let (a, da) = f.eval(x);
    let (b, db) = g.eval(x);
    Ok(a * db - da * b)
}

const POLE_FLOOR: f64 = 1e-12;

/// Weyl–Titchmarsh m-function from the Jost solution.
pub fn m_function(v: &Potential1D, pt: &SpectralPoint, bc: Bc, settings: &Settings) -> Result<C64> {
    let f = jost_solution(v, pt, settings)?;
    m_from_boundary(f.value_at_0, f.derivative_at_0, bc)
}

pub(crate) fn m_from_boundary(f0: C64, df0: C64, bc: Bc) -> Result<C64> {
    match bc {
        Bc::Dirichlet => {
            if f0.norm() < POLE_FLOOR {
                return Err(Error::Pole {
                    what: "f(z, 0)",
                    magnitude: f0.norm(),
                });
            }
            Ok(df0 / f0)
        }
        Bc::Neumann => {
            if df0.norm() < POLE_FLOOR {
                return Err(Error::Pole {
                    what: "f'(z, 0)",
                    magnitude: df0.norm(),
                });
            }
            Ok(-f0 / df0)
        }
    }
}

/// Dirichlet m-function from the Riccati equation m' = V − z − m²,
/// integrated inward from m(x_max) = i√z.
pub fn m_function_riccati(v: &Potential1D, pt: &SpectralPoint, settings: &Settings) -> Result<C64> {
    settings.validate()?;
    v.check_tail(TAIL_BUDGET)?;
    let z = pt.z;
    let traj = integrate(
        |x, m: &[C64; 1]| [v.eval(x) - z - m[0] * m[0]],
        v.x_max,
        0.0,
        [I * pt.sqrt_z],
        &v.breakpoints,
        settings.ode_tol,
    )?;
    finite(traj.end().1[0], "Riccati m-function")
}
