//! Identity reports: several independently computed values of one quantity.

use serde::{Deserialize, Serialize};

use crate::numerics::C64;

/// One computed side of an identity, tagged with the pipelines it used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub name: String,
    pub value: C64,
    pub pipelines: Vec<String>,
}

impl Side {
    pub fn new(name: &str, value: C64, pipelines: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            value,
            pipelines: pipelines.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Snapshot of the discretization behind a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_panels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes_per_panel: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid_sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_estimate: Option<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub z: Option<C64>,
    pub sides: Vec<Side>,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub discretization: Discretization,
    pub converged: bool,
    /// Reasons the report is unconverged regardless of its residual.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl IdentityReport {
    /// Builds a report; the residual is the largest pairwise difference.
    pub fn new(
        name: &str,
        z: Option<C64>,
        sides: Vec<Side>,
        tolerance: f64,
        mut discretization: Discretization,
    ) -> Self {
        let mut abs_residual: f64 = 0.0;
        for i in 0..sides.len() {
            for j in i + 1..sides.len() {
                abs_residual = abs_residual.max((sides[i].value - sides[j].value).norm());
            }
        }
        let scale = sides
            .iter()
            .map(|s| s.value.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let rel_residual = abs_residual / scale;
        discretization.tolerance = tolerance;
        let effective = tolerance + discretization.tail_estimate.unwrap_or(0.0);
        Self {
            name: name.to_string(),
            z,
            sides,
            abs_residual,
            rel_residual,
            discretization,
            converged: rel_residual <= effective,
            failures: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    /// Forces the report unconverged, recording why.
    pub fn fail(&mut self, reason: impl Into<String>) {
        self.converged = false;
        self.failures.push(reason.into());
    }

    /// Re-judges the residual against a new tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.discretization.tolerance = tolerance;
        let effective = tolerance + self.discretization.tail_estimate.unwrap_or(0.0);
        self.converged = self.failures.is_empty() && self.rel_residual <= effective;
        self
    }

    pub fn side(&self, name: &str) -> Option<C64> {
        self.sides.iter().find(|s| s.name == name).map(|s| s.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_is_max_pairwise() {
        let r = IdentityReport::new(
            "t",
            None,
            vec![
                Side::new("a", C64::new(1.0, 0.0), &[]),
                Side::new("b", C64::new(1.0, 1e-3), &[]),
                Side::new("c", C64::new(1.0 + 2e-3, 0.0), &[]),
            ],
            1e-2,
            Discretization::default(),
        );
        let want = (C64::new(2e-3, -1e-3)).norm();
        assert!((r.abs_residual - want).abs() < 1e-15);
        assert!(r.converged);
    }

    #[test]
    fn zero_sides_are_guarded() {
        let r = IdentityReport::new(
            "t",
            None,
            vec![
                Side::new("a", C64::new(0.0, 0.0), &[]),
                Side::new("b", C64::new(0.0, 0.0), &[]),
            ],
            1e-6,
            Discretization::default(),
        );
        assert_eq!(r.rel_residual, 0.0);
        assert!(r.converged);
    }
}
