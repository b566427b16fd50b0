use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeterminantKind {
    Det1,
    Det2,
}

/// Grid sequence for a determinant: base panel count doubled per level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementPolicy {
    pub n_panels: usize,
    pub nodes_per_panel: usize,
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl Default for RefinementPolicy {
    fn default() -> Self {
        Self {
            n_panels: 8,
            nodes_per_panel: 16,
            tolerance: 1e-10,
            max_refinements: 4,
        }
    }
}

impl RefinementPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.n_panels == 0 || !(2..=64).contains(&self.nodes_per_panel) {
            return Err(Error::Parameter(
                "refinement policy needs n_panels >= 1 and 2..=64 nodes".into(),
            ));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Parameter(
                "refinement tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn panels_at(&self, level: usize) -> usize {
        self.n_panels << level
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminantResult {
    pub value: C64,
    pub kind: DeterminantKind,
    pub grid_sizes: Vec<usize>,
    pub values_per_grid: Vec<C64>,
    pub error_estimate: f64,
    pub converged: bool,
}

impl DeterminantResult {
    /// Runs `level_value(n_panels)` on successively doubled grids until two
    /// consecutive values agree or the refinement cap is reached. The
    /// closure returns the value and the node count it used.
    pub fn refine<F>(
        policy: &RefinementPolicy,
        kind: DeterminantKind,
        mut level_value: F,
    ) -> Result<Self>
    where
        F: FnMut(usize) -> Result<(C64, usize)>,
    {
        policy.validate()?;
        let mut grid_sizes = Vec::new();
        let mut values = Vec::new();
        let mut error_estimate = f64::INFINITY;
        for level in 0..=policy.max_refinements.max(1) {
            let (v, n) = level_value(policy.panels_at(level))?;
            crate::error::finite(v, "determinant")?;
            grid_sizes.push(n);
            values.push(v);
            if values.len() >= 2 {
                let last = values[values.len() - 1];
                let prev = values[values.len() - 2];
                error_estimate = (last - prev).norm() / last.norm().max(1.0);
                if error_estimate <= policy.tolerance {
                    break;
                }
            }
        }
        Ok(Self {
            value: *values.last().unwrap(),
            kind,
            grid_sizes,
            values_per_grid: values,
            error_estimate,
            converged: error_estimate <= policy.tolerance,
        })
    }

    /// Converts an unconverged result into a convergence error.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Convergence {
                values: self.values_per_grid,
                error: self.error_estimate,
            })
        }
    }
}
