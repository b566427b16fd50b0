//! Eigenvalue location on the negative axis from zeros of boundary scalars,
//! checked against the finite-difference oracle.

use serde::{Deserialize, Serialize};

use crate::disk::{ModePipeline, RadialPotential2D};
use crate::error::{Error, Result};
use crate::halfline::{
    boundary_scalar_1d, dirichlet_boundary_scalar_1d, Bc, Potential1D, SpectralPoint,
};
use crate::numerics::{DeterminantKind, DeterminantResult, C64};
use crate::settings::Settings;
use crate::verify::oracle::{halfline_fd_eigenvalues, radial_fd_eigenvalues};

/// Root tolerance in z.
pub const ROOT_TOLERANCE: f64 = 1e-9;
/// A bracketed root whose |D| exceeds this fraction of the bracket scale is a pole.
pub const POLE_RATIO: f64 = 1e-8;

/// Which scalar is scanned.
#[derive(Debug, Clone, Copy)]
pub enum ScanProblem<'a> {
    Halfline {
        v: &'a Potential1D,
        bc: Bc,
    },
    DiskMode {
        v: &'a RadialPotential2D,
        ell: i64,
        bc: Bc,
    },
}

impl ScanProblem<'_> {
    pub fn bc(&self) -> Bc {
        match *self {
            ScanProblem::Halfline { bc, .. } | ScanProblem::DiskMode { bc, .. } => bc,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ScanProblem::Halfline { bc, .. } => format!("halfline_{}", bc.name()),
            ScanProblem::DiskMode { ell, bc, .. } => format!("disk_l{ell}_{}", bc.name()),
        }
    }

    /// The scalar whose zeros on the negative axis are eigenvalues with
    /// this boundary condition.
    pub fn scalar(&self, z: f64, settings: &Settings) -> Result<C64> {
        let pt = SpectralPoint::new(C64::new(z, 0.0))?;
        match *self {
            ScanProblem::Halfline { v, bc: Bc::Neumann } => {
                Ok(boundary_scalar_1d(v, &pt, settings)?.value)
            }
            ScanProblem::Halfline {
                v,
                bc: Bc::Dirichlet,
            } => Ok(dirichlet_boundary_scalar_1d(v, &pt, settings)?.value),
            ScanProblem::DiskMode { v, ell, bc } => {
                let r =
                    DeterminantResult::refine(&settings.policy, DeterminantKind::Det1, |panels| {
                        let grid = v.grid(panels, settings.policy.nodes_per_panel)?;
                        let p = ModePipeline::new(ell, v, &pt, &grid, settings)?;
                        let value = match bc {
                            Bc::Neumann => C64::new(1.0, 0.0) - p.boundary_entry()?,
                            Bc::Dirichlet => C64::new(1.0, 0.0) + p.reciprocal_entry()?,
                        };
                        Ok((value, grid.nodes.len()))
                    })?;
                Ok(r.value)
            }
        }
    }

    fn oracle(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        match *self {
            ScanProblem::Halfline { v, bc } => halfline_fd_eigenvalues(v, bc, lo, hi),
            ScanProblem::DiskMode { v, ell, bc } => radial_fd_eigenvalues(v, ell, bc, lo, hi),
        }
    }

    fn real_valued(&self) -> bool {
        match *self {
            ScanProblem::Halfline { v, .. } => v.real_valued,
            ScanProblem::DiskMode { v, .. } => v.real_valued,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenScanResult {
    pub problem: String,
    pub bc: Bc,
    pub bracket_intervals: Vec<(f64, f64)>,
    pub roots: Vec<f64>,
    pub root_residuals: Vec<f64>,
    pub oracle_values: Vec<f64>,
    pub rejected_poles: Vec<f64>,
    /// A rejected pole sits within 10⁻³ of an accepted root.
    pub ill_conditioned: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl EigenScanResult {
    /// Nearest oracle value for each root, with the distance.
    pub fn matches(&self) -> Vec<(f64, Option<f64>, f64)> {
        self.roots
            .iter()
            .map(|&root| {
                let best = self
                    .oracle_values
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - root).abs().total_cmp(&(b - root).abs()));
                (root, best, best.map_or(f64::INFINITY, |o| (o - root).abs()))
            })
            .collect()
    }

    /// Largest distance from a root to its oracle value; infinite when the
    /// counts differ.
    pub fn max_mismatch(&self) -> f64 {
        if self.roots.len() != self.oracle_values.len() {
            return f64::INFINITY;
        }
        self.matches().iter().map(|m| m.2).fold(0.0, f64::max)
    }
}

/// Samples the scalar on `n_samples` points of `z_range`, brackets sign
/// changes of its real part, refines each to |Δz| ≤ 10⁻⁹ and separates
/// zeros from poles.
pub fn eigenvalue_scan(
    problem: &ScanProblem<'_>,
    z_range: (f64, f64),
    n_samples: usize,
    settings: &Settings,
) -> Result<EigenScanResult> {
    let (lo, hi) = z_range;
    if !(lo < hi && hi < 0.0 && lo.is_finite()) {
        return Err(Error::Parameter(format!(
            "scan range ({lo}, {hi}) must be an interval of the negative axis"
        )));
    }
    if n_samples < 2 {
        return Err(Error::Parameter("scan needs at least two samples".into()));
    }
    if !problem.real_valued() {
        return Err(Error::Parameter(
            "eigenvalue scan needs a real potential".into(),
        ));
    }
    settings.validate()?;
    // Two grid levels suffice near zeros; extra levels only buy time near poles.
    let mut sampling = *settings;
    sampling.policy.max_refinements = sampling.policy.max_refinements.min(1);

    let eval = |z: f64| -> Result<Option<C64>> {
        match problem.scalar(z, &sampling) {
            Ok(d) => Ok(Some(d)),
            Err(e) if e.is_spectral() => Ok(None),
            Err(e) => Err(e),
        }
    };

    let mut diagnostics = Vec::new();
    let zs: Vec<f64> = (0..n_samples)
        .map(|s| lo + (hi - lo) * s as f64 / (n_samples - 1) as f64)
        .collect();
    let mut samples = Vec::with_capacity(n_samples);
    for &z in &zs {
        let d = eval(z)?;
        if let Some(d) = d {
            if d.im.abs() > 1e-6 * d.norm().max(1e-300) {
                diagnostics.push(format!("Im D({z:.6}) = {:.3e} is not negligible", d.im));
            }
        } else {
            diagnostics.push(format!("sample z = {z:.6} skipped (singular)"));
        }
        samples.push(d);
    }

    let mut brackets = Vec::new();
    for s in 0..n_samples - 1 {
        if let (Some(a), Some(b)) = (samples[s], samples[s + 1]) {
            if a.re == 0.0 || a.re * b.re < 0.0 {
                brackets.push((zs[s], zs[s + 1], a.re, b.re));
            }
        }
    }
    if let Some(last) = samples[n_samples - 1] {
        if last.re == 0.0 {
            brackets.push((zs[n_samples - 1], zs[n_samples - 1], 0.0, 0.0));
        }
    }

    let mut result = EigenScanResult {
        problem: problem.label(),
        bc: problem.bc(),
        bracket_intervals: brackets.iter().map(|b| (b.0, b.1)).collect(),
        roots: Vec::new(),
        root_residuals: Vec::new(),
        oracle_values: problem.oracle(lo, hi)?,
        rejected_poles: Vec::new(),
        ill_conditioned: false,
        diagnostics,
    };

    for &(a, b, fa, fb) in &brackets {
        let scale = fa.abs().max(fb.abs());
        match refine_root(&eval, a, b, fa, fb)? {
            RootOutcome::Root { z, residual } if residual <= POLE_RATIO * scale => {
                result.roots.push(z);
                result.root_residuals.push(residual);
            }
            RootOutcome::Root { z, .. } | RootOutcome::Singular(z) => result.rejected_poles.push(z),
        }
    }
    result.ill_conditioned = result.rejected_poles.iter().any(|p| {
        result
            .roots
            .iter()
            .any(|r| (p - r).abs() < 1e-3 * (1.0 + r.abs()))
    });
    Ok(result)
}

enum RootOutcome {
    Root { z: f64, residual: f64 },
    Singular(f64),
}

/// Bisection down to 10⁻⁵, then secant steps kept inside the bracket.
/// Near a zero the smaller endpoint value shrinks with the bracket; near a
/// pole it grows, and the search stops once it exceeds ten times the
/// initial scale.
fn refine_root<F>(eval: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<RootOutcome>
where
    F: Fn(f64) -> Result<Option<C64>>,
{
    if a == b {
        return Ok(RootOutcome::Root {
            z: a,
            residual: 0.0,
        });
    }
    let blowup = 10.0 * fa.abs().max(fb.abs());
    let value = |z: f64| -> Result<Option<f64>> { Ok(eval(z)?.map(|d| d.re)) };
    while b - a > 1e-5 {
        let m = 0.5 * (a + b);
        let Some(fm) = value(m)? else {
            return Ok(RootOutcome::Singular(m));
        };
        if fm == 0.0 {
            return Ok(RootOutcome::Root {
                z: m,
                residual: 0.0,
            });
        }
        if fa * fm < 0.0 {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
        if fa.abs().min(fb.abs()) > blowup {
            return Ok(RootOutcome::Singular(0.5 * (a + b)));
        }
    }
    let mut best = if fa.abs() < fb.abs() {
        (a, fa.abs())
    } else {
        (b, fb.abs())
    };
    for _ in 0..60 {
        if b - a <= ROOT_TOLERANCE {
            break;
        }
        let mut z = b - fb * (b - a) / (fb - fa);
        if !(z > a && z < b) {
            z = 0.5 * (a + b);
        }
        let Some(fz) = value(z)? else {
            return Ok(RootOutcome::Singular(z));
        };
        if fz.abs() < best.1 {
            best = (z, fz.abs());
        }
        if fz == 0.0 {
            break;
        }
        // Shrink from the side the secant lands on, and pull the far end in
        // so the bracket width itself converges.
        let step = (b - a) * 1e-3;
        if fa * fz < 0.0 {
            b = z;
            fb = fz;
            let probe = (z - step).max(a);
            if probe > a {
                if let Some(fp) = value(probe)? {
                    if fp * fz < 0.0 {
                        a = probe;
                        fa = fp;
                    }
                }
            }
        } else {
            a = z;
            fa = fz;
            let probe = (z + step).min(b);
            if probe < b {
                if let Some(fp) = value(probe)? {
                    if fp * fz < 0.0 {
                        b = probe;
                        fb = fp;
                    }
                }
            }
        }
    }
    let residual = eval(best.0)?.map(|d| d.norm());
    Ok(match residual {
        Some(residual) => RootOutcome::Root {
            z: best.0,
            residual,
        },
        None => RootOutcome::Singular(best.0),
    })
}
