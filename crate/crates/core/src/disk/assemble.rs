//! Products and sums over angular modes, with power-law tail estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::modes::ModeData;
use super::potential::RadialPotential2D;
use super::radial::{check_admissible, MAX_MODE};
use crate::error::{Error, Result};
use crate::halfline::SpectralPoint;
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::{C64, ONE, ZERO};
use crate::settings::Settings;

/// Relative tail budget for mode products.
pub const MODE_TAIL_TOLERANCE: f64 = 1e-6;
/// Modes with |d_ℓ − 1| below this end the product early.
pub const STOP_THRESHOLD: f64 = 1e-8;
const STOP_RUN: usize = 3;
const FIT_WINDOW: usize = 10;

/// A product or sum truncated at |ℓ| ≤ l_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSumResult {
    pub l_max: i64,
    pub partial: C64,
    pub tail_estimate: f64,
    pub total: C64,
    pub converged: bool,
    /// Exponent α of the fit C|ℓ|^{−α} to the last modes, if one was made.
    pub fit_exponent: Option<f64>,
}

/// Least-squares fit of t_ℓ ≈ C ℓ^{−α} over the last modes with t_ℓ > 0.
fn power_fit(terms: &[(i64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = terms
        .iter()
        .rev()
        .filter(|(l, t)| *l >= 1 && *t > 0.0)
        .take(FIT_WINDOW)
        .map(|&(l, t)| ((l as f64).ln(), t.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some(((my - slope * mx).exp(), -slope))
}

/// 2 Σ_{ℓ > L} C ℓ^{−α}, bounded by the integral from L + ½.
fn fitted_tail(terms: &[(i64, f64)], l_max: i64) -> (f64, Option<f64>) {
    if terms.iter().all(|(l, t)| *l == 0 || *t == 0.0) {
        return (0.0, None);
    }
    match power_fit(terms) {
        Some((c, alpha)) if alpha > 1.0 => (
            2.0 * c * (l_max as f64 + 0.5).powf(1.0 - alpha) / (alpha - 1.0),
            Some(alpha),
        ),
        Some((_, alpha)) => (f64::INFINITY, Some(alpha)),
        None => (f64::INFINITY, None),
    }
}

impl ModeSumResult {
    /// Π_{|ℓ| ≤ L} f_ℓ, each ℓ ≠ 0 counted for ±ℓ.
    pub fn product(modes: &[ModeData], factor: impl Fn(&ModeData) -> C64, tolerance: f64) -> Self {
        let mut partial = ONE;
        let mut terms = Vec::with_capacity(modes.len());
        for m in modes {
            let f = factor(m);
            partial *= if m.ell == 0 { f } else { f * f };
            terms.push((m.ell, (f - 1.0).norm()));
        }
        let l_max = modes.last().map_or(0, |m| m.ell);
        let (s, fit_exponent) = fitted_tail(&terms, l_max);
        let tail_estimate = partial.norm() * s.exp_m1();
        Self {
            l_max,
            partial,
            tail_estimate,
            total: partial,
            converged: tail_estimate <= tolerance * partial.norm(),
            fit_exponent,
        }
    }

    /// Σ_{|ℓ| ≤ L} s_ℓ, each ℓ ≠ 0 counted for ±ℓ.
    pub fn sum(modes: &[ModeData], term: impl Fn(&ModeData) -> C64, tolerance: f64) -> Self {
        let mut partial = ZERO;
        let mut terms = Vec::with_capacity(modes.len());
        for m in modes {
            let s = term(m);
            partial += if m.ell == 0 { s } else { 2.0 * s };
            terms.push((m.ell, s.norm()));
        }
        let l_max = modes.last().map_or(0, |m| m.ell);
        let (tail_estimate, fit_exponent) = fitted_tail(&terms, l_max);
        Self {
            l_max,
            partial,
            tail_estimate,
            total: partial,
            converged: tail_estimate <= tolerance * partial.norm(),
            fit_exponent,
        }
    }
}

/// Data of modes ℓ = 0..=l_max (the modes −ℓ coincide for radial V),
/// computed in parallel and returned in ℓ order.
pub fn compute_modes(
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    l_max: i64,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<Vec<ModeData>> {
    if !(0..=MAX_MODE).contains(&l_max) {
        return Err(Error::ModeRange(l_max));
    }
    check_admissible(pt)?;
    (0..=l_max)
        .into_par_iter()
        .map(|ell| ModeData::compute(ell, v, pt, grid, settings))
        .collect()
}

/// Modes up to the first run of three consecutive |d_ℓ − 1| < 10⁻⁸.
fn truncate(modes: &[ModeData]) -> &[ModeData] {
    let mut run = 0;
    for (i, m) in modes.iter().enumerate() {
        run = if m.abs_d_minus_1() < STOP_THRESHOLD {
            run + 1
        } else {
            0
        };
        if run == STOP_RUN {
            return &modes[..=i];
        }
    }
    modes
}

/// The three sides of the boundary reduction of the det₂ ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskAssembly {
    /// Π det₂(I + K_N,ℓ)/det₂(I + K_D,ℓ).
    pub q1: ModeSumResult,
    /// Π (1 − b_ℓ) e^{b_ℓ} · exp Σ τ_ℓ.
    pub q2: ModeSumResult,
    /// Π d_ℓ e^{1 − d_ℓ} · exp Σ τ_ℓ.
    pub q3: ModeSumResult,
    /// Σ τ_ℓ.
    pub trace_t2: ModeSumResult,
    /// Σ |d_ℓ − 1|², the Hilbert–Schmidt norm² of the boundary operator.
    pub hs_norm_sq: ModeSumResult,
    /// Exponent of the power-law fit to |d_ℓ − 1|.
    pub d_decay_exponent: Option<f64>,
    pub modes: Vec<ModeData>,
}

impl DiskAssembly {
    pub fn from_modes(modes: Vec<ModeData>) -> Self {
        let used = truncate(&modes);
        let tol = MODE_TAIL_TOLERANCE;
        let d_terms: Vec<(i64, f64)> = used.iter().map(|m| (m.ell, m.abs_d_minus_1())).collect();
        Self {
            q1: ModeSumResult::product(used, ModeData::det2_ratio, tol),
            q2: ModeSumResult::product(used, ModeData::boundary_factor, tol),
            q3: ModeSumResult::product(used, ModeData::dtn_factor, tol),
            trace_t2: ModeSumResult::sum(used, |m| m.tau_ell, tol),
            hs_norm_sq: hs_summability(used),
            d_decay_exponent: power_fit(&d_terms).map(|f| f.1),
            modes: used.to_vec(),
        }
    }

    /// Largest tail estimate of the three products, relative to their size.
    pub fn relative_tail(&self) -> f64 {
        [&self.q1, &self.q2, &self.q3]
            .iter()
            .map(|q| q.tail_estimate / q.partial.norm().max(1e-300))
            .fold(0.0, f64::max)
    }
}

/// Σ |d_ℓ − 1|² with its fitted tail.
pub fn hs_summability(modes: &[ModeData]) -> ModeSumResult {
    ModeSumResult::sum(
        modes,
        |m| C64::new(m.abs_d_minus_1().powi(2), 0.0),
        MODE_TAIL_TOLERANCE,
    )
}

/// Q1, Q2, Q3 over |ℓ| ≤ l_max.
pub fn assemble_theorem_4_2(
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    l_max: i64,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<DiskAssembly> {
    Ok(DiskAssembly::from_modes(compute_modes(
        v, pt, l_max, grid, settings,
    )?))
}

/// The reduction with the roles of D and N interchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReciprocalAssembly {
    /// Π det₂(I + K_D,ℓ)/det₂(I + K_N,ℓ).
    pub lhs: ModeSumResult,
    /// Π (1 + c_ℓ) e^{−c_ℓ} · exp(−Σ τ'_ℓ).
    pub rhs: ModeSumResult,
    pub modes: Vec<ModeData>,
}

impl ReciprocalAssembly {
    pub fn from_modes(modes: Vec<ModeData>) -> Self {
        let used = truncate(&modes);
        let tol = MODE_TAIL_TOLERANCE;
        Self {
            lhs: ModeSumResult::product(used, |m| m.det2_d_ell / m.det2_n_ell, tol),
            rhs: ModeSumResult::product(used, ModeData::reciprocal_boundary_factor, tol),
            modes: used.to_vec(),
        }
    }
}

pub fn assemble_eq_4_37(
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    l_max: i64,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<ReciprocalAssembly> {
    Ok(ReciprocalAssembly::from_modes(compute_modes(
        v, pt, l_max, grid, settings,
    )?))
}
