use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::linalg::DEFAULT_PIVOT_THRESHOLD;
use crate::numerics::RefinementPolicy;

/// Numerical knobs shared by the half-line and disk pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Local error tolerance of the ODE integrator.
    pub ode_tol: f64,
    /// Nyström grid sequence and determinant agreement tolerance.
    pub policy: RefinementPolicy,
    /// Relative pivot threshold for linear solves.
    pub pivot_threshold: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            ode_tol: 1e-12,
            policy: RefinementPolicy::default(),
            pivot_threshold: DEFAULT_PIVOT_THRESHOLD,
        }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        if !(1e-14..=1e-6).contains(&self.ode_tol) {
            return Err(Error::Parameter(format!(
                "ode_tol {} outside [1e-14, 1e-6]",
                self.ode_tol
            )));
        }
        self.policy.validate()
    }

    /// The next step of a convergence study: half the tolerances, twice the nodes.
    pub fn tightened(&self) -> Self {
        Self {
            ode_tol: (self.ode_tol * 0.5).max(1e-14),
            policy: RefinementPolicy {
                n_panels: self.policy.n_panels * 2,
                tolerance: self.policy.tolerance * 0.5,
                ..self.policy
            },
            ..*self
        }
    }
}
