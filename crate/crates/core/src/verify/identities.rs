//! Both sides of each determinant identity, from independent pipelines.

use serde::{Deserialize, Serialize};

use crate::disk::{
    check_admissible, DiskAssembly, ModeData, ModePipeline, RadialPotential2D, ReciprocalAssembly,
};
use crate::error::{Error, Result};
use crate::halfline::{
    boundary_scalar_1d, bs_kernel, fredholm_det_halfline, jost_solution, m_function,
    m_function_riccati, nystrom_grid, regular_solution_dirichlet, regular_solution_neumann,
    wronskian, Bc, Potential1D, SpectralPoint,
};
use crate::numerics::linalg::solve_linear_with_threshold;
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::{ComplexMatrix, DeterminantKind, DeterminantResult, C64, I, ONE};
use crate::report::{Discretization, IdentityReport, Side};
use crate::settings::Settings;

/// Default agreement tolerance for one-dimensional identities.
pub const HALFLINE_TOLERANCE: f64 = 1e-6;
/// Default agreement tolerance for the mode-product identities.
pub const DISK_TOLERANCE: f64 = 1e-4;

fn halfline_discretization(
    v: &Potential1D,
    settings: &Settings,
    grid_sizes: Vec<usize>,
) -> Discretization {
    Discretization {
        x_max: Some(v.x_max),
        n_panels: Some(settings.policy.n_panels),
        nodes_per_panel: Some(settings.policy.nodes_per_panel),
        grid_sizes,
        ..Default::default()
    }
}

/// 1 + k⁻¹∫ sin(kx) V f dx (Dirichlet) or 1 + (i/k)∫ cos(kx) V f dx
/// (Neumann), with f solved from its Volterra equation by product-integrated
/// Nyström in the gauge F = f e^{−ikx}.
pub fn volterra_integral_form(
    v: &Potential1D,
    pt: &SpectralPoint,
    bc: Bc,
    settings: &Settings,
) -> Result<DeterminantResult> {
    v.check_tail(crate::halfline::TAIL_BUDGET)?;
    let policy = settings.policy;
    let k = pt.sqrt_z;
    // (e^{2ik(y−x)} − 1)/(2ik) = sin(k(y−x)) e^{ik(y−x)}/k
    let kern = move |d: f64| ((2.0 * I * k * d).exp() - 1.0) / (2.0 * I * k);
    DeterminantResult::refine(&policy, DeterminantKind::Det1, |panels| {
        let grid = nystrom_grid(v, pt, panels, policy.nodes_per_panel)?;
        let f = volterra_jost(v, &grid, &kern, settings.pivot_threshold)?;
        let value = ONE
            + (0..grid.len())
                .map(|j| {
                    let y = grid.nodes[j];
                    let e = (2.0 * I * k * y).exp();
                    let w = match bc {
                        Bc::Dirichlet => (e - 1.0) / (2.0 * I * k),
                        Bc::Neumann => I / k * (e + 1.0) / 2.0,
                    };
                    grid.weights[j] * w * v.eval(y) * f[j]
                })
                .sum::<C64>();
        Ok((value, grid.len()))
    })?
    .require_converged()
}

/// F = e^{−ikx} f at the nodes, from F(x) = 1 + ∫_x κ(y − x) V(y) F(y) dy.
fn volterra_jost(
    v: &Potential1D,
    grid: &QuadratureGrid,
    kern: &dyn Fn(f64) -> C64,
    threshold: f64,
) -> Result<Vec<C64>> {
    let n = grid.len();
    let kp = grid.nodes_per_panel;
    let s = grid.reference_rule().cumulative_matrix();
    let pot: Vec<C64> = grid.nodes.iter().map(|&y| v.eval(y)).collect();
    let mut data: Vec<C64> = ComplexMatrix::identity(n).as_slice().to_vec();
    for i in 0..n {
        let p = grid.panel_of(i);
        let (l, r) = grid.panels[p];
        let half = 0.5 * (r - l);
        let il = i - p * kp;
        for j in p * kp..n {
            let w = if grid.panel_of(j) == p {
                let jl = j - p * kp;
                half * (grid.reference_rule().weights[jl] - s[il * kp + jl])
            } else {
                grid.weights[j]
            };
            data[i * n + j] -= w * kern(grid.nodes[j] - grid.nodes[i]) * pot[j];
        }
    }
    let m = ComplexMatrix::from_rows(n, n, data)?;
    solve_linear_with_threshold(&m, &vec![ONE; n], threshold)
}

/// The four forms of the Jost–Pais identity for the given boundary condition.
pub fn verify_jost_pais(
    v: &Potential1D,
    pt: &SpectralPoint,
    bc: Bc,
    settings: &Settings,
) -> Result<IdentityReport> {
    jost_pais_with_tolerance(v, pt, bc, settings, HALFLINE_TOLERANCE)
}

pub fn jost_pais_with_tolerance(
    v: &Potential1D,
    pt: &SpectralPoint,
    bc: Bc,
    settings: &Settings,
    tolerance: f64,
) -> Result<IdentityReport> {
    let det = fredholm_det_halfline(v, pt, bc, &settings.policy)?;
    let f = jost_solution(v, pt, settings)?;
    let x_w = (0.5 * v.x_max).min(1.0);
    let k = pt.sqrt_z;
    let (wron, boundary) = match bc {
        Bc::Dirichlet => {
            let phi = regular_solution_dirichlet(v, pt, settings)?;
            (wronskian(&f, &phi, x_w)?, f.value_at_0)
        }
        Bc::Neumann => {
            let theta = regular_solution_neumann(v, pt, settings)?;
            (
                -wronskian(&f, &theta, x_w)? / (I * k),
                f.derivative_at_0 / (I * k),
            )
        }
    };
    let integral = volterra_integral_form(v, pt, bc, settings)?;
    let sides = vec![
        Side::new("nystrom_det", det.value, &["bs_nystrom"]),
        Side::new("wronskian_form", wron, &["ode_jost", "ode_regular"]),
        Side::new("jost_boundary_form", boundary, &["ode_jost"]),
        Side::new(
            "volterra_integral_form",
            integral.value,
            &["volterra_nystrom"],
        ),
    ];
    let name = format!("jost_pais_{}", bc.name());
    let disc = halfline_discretization(v, settings, det.grid_sizes.clone());
    Ok(IdentityReport::new(
        &name,
        Some(pt.z),
        sides,
        tolerance,
        disc,
    ))
}

/// Ratio of the Neumann and Dirichlet determinants against the boundary
/// scalar and the two m-function ratios.
pub fn verify_ratio_1d(
    v: &Potential1D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<IdentityReport> {
    ratio_1d_with_tolerance(v, pt, settings, HALFLINE_TOLERANCE)
}

pub fn ratio_1d_with_tolerance(
    v: &Potential1D,
    pt: &SpectralPoint,
    settings: &Settings,
    tolerance: f64,
) -> Result<IdentityReport> {
    let k = pt.sqrt_z;
    let dn = fredholm_det_halfline(v, pt, Bc::Neumann, &settings.policy)?;
    let dd = fredholm_det_halfline(v, pt, Bc::Dirichlet, &settings.policy)?;
    let scalar = boundary_scalar_1d(v, pt, settings)?.require_converged()?;
    let m_d = m_function(v, pt, Bc::Dirichlet, settings)?;
    // m^N = −1/m^D, with m^D from the Riccati flow; m₀^N = i/k
    let m_d_riccati = m_function_riccati(v, pt, settings)?;
    let m_n = -ONE / m_d_riccati;
    let sides = vec![
        Side::new("det_ratio", dn.value / dd.value, &["bs_nystrom"]),
        Side::new("boundary_scalar", scalar.value, &["boundary_resolvent"]),
        Side::new("m_ratio_D", m_d / (I * k), &["ode_jost"]),
        Side::new("m_ratio_N", (I / k) / m_n, &["ode_riccati"]),
    ];
    let disc = halfline_discretization(v, settings, scalar.grid_sizes.clone());
    Ok(IdentityReport::new(
        "ratio_1d",
        Some(pt.z),
        sides,
        tolerance,
        disc,
    ))
}

fn disk_discretization(
    v: &RadialPotential2D,
    grid: &QuadratureGrid,
    l_max: i64,
    tail: f64,
) -> Discretization {
    Discretization {
        radius: Some(v.radius),
        n_panels: Some(grid.panels.len()),
        nodes_per_panel: Some(grid.nodes_per_panel),
        grid_sizes: vec![grid.len()],
        l_max: Some(l_max),
        tail_estimate: Some(tail),
        ..Default::default()
    }
}

/// Q1 = Q2 = Q3 from an assembled mode product.
pub fn theorem_4_2_report(
    a: &DiskAssembly,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    grid: &QuadratureGrid,
    tolerance: f64,
) -> IdentityReport {
    let l_max = a.modes.last().map_or(0, |m| m.ell);
    let sides = vec![
        Side::new("Q1", a.q1.partial, &["mode_bs_det2"]),
        Side::new("Q2", a.q2.partial, &["boundary_bs", "trace_t2"]),
        Side::new("Q3", a.q3.partial, &["radial_dtn", "trace_t2"]),
    ];
    let tail = a.relative_tail();
    let mut r = IdentityReport::new(
        "thm_4_2",
        Some(pt.z),
        sides,
        tolerance,
        disk_discretization(v, grid, l_max, tail),
    );
    if tail > crate::disk::MODE_TAIL_TOLERANCE {
        r.fail(format!(
            "mode tail estimate {tail:.3e} exceeds {:.0e}",
            crate::disk::MODE_TAIL_TOLERANCE
        ));
    }
    r.diagnostics
        .push(format!("sum |d-1|^2 = {:.6e}", a.hs_norm_sq.partial.re));
    if let Some(alpha) = a.d_decay_exponent {
        r.diagnostics.push(format!("|d_l - 1| ~ l^-{alpha:.3}"));
    }
    r
}

/// The det₂ ratio over L²(Ω) against its boundary reduction, mode by mode.
pub fn verify_theorem_4_2(
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    l_max: i64,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<IdentityReport> {
    let a = crate::disk::assemble_theorem_4_2(v, pt, l_max, grid, settings)?;
    Ok(theorem_4_2_report(&a, v, pt, grid, DISK_TOLERANCE))
}

/// The reduction with D and N swapped, plus reciprocity with Q1.
pub fn eq_4_37_report(
    r: &ReciprocalAssembly,
    q1: C64,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    grid: &QuadratureGrid,
    tolerance: f64,
) -> IdentityReport {
    let l_max = r.modes.last().map_or(0, |m| m.ell);
    let sides = vec![
        Side::new("det2_ratio_D_over_N", r.lhs.partial, &["mode_bs_det2"]),
        Side::new(
            "boundary_form",
            r.rhs.partial,
            &["boundary_bs_neumann", "trace_t2_neumann"],
        ),
        Side::new("inverse_Q1", ONE / q1, &["mode_bs_det2"]),
    ];
    let tail = r.lhs.tail_estimate.max(r.rhs.tail_estimate) / r.lhs.partial.norm().max(1e-300);
    let mut rep = IdentityReport::new(
        "eq_4_37",
        Some(pt.z),
        sides,
        tolerance,
        disk_discretization(v, grid, l_max, tail),
    );
    rep.diagnostics.push(format!(
        "|lhs * Q1 - 1| = {:.3e}",
        (r.lhs.partial * q1 - 1.0).norm()
    ));
    rep
}

pub fn verify_eq_4_37(
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    l_max: i64,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<IdentityReport> {
    let modes = crate::disk::compute_modes(v, pt, l_max, grid, settings)?;
    let q1 = DiskAssembly::from_modes(modes.clone()).q1.partial;
    Ok(eq_4_37_report(
        &ReciprocalAssembly::from_modes(modes),
        q1,
        v,
        pt,
        grid,
        DISK_TOLERANCE,
    ))
}

/// Per-mode reports: n·m = −1, m₀ − m against its trace form and
/// m/m₀ against 1 − b.
pub fn mode_identity_reports(m: &ModeData, z: C64, disc: &Discretization) -> Vec<IdentityReport> {
    let l = m.ell;
    vec![
        IdentityReport::new(
            &format!("ntd_dtn_reciprocity_l{l}"),
            Some(z),
            vec![
                Side::new(
                    "n_times_m",
                    m.n_ell * m.m_ell,
                    &["ode_riccati", "ode_radial"],
                ),
                Side::new("minus_one", -ONE, &[]),
            ],
            1e-10,
            disc.clone(),
        ),
        IdentityReport::new(
            &format!("dtn_difference_l{l}"),
            Some(z),
            vec![
                Side::new("m0_minus_m", m.m0_ell - m.m_ell, &["ode_radial"]),
                Side::new("trace_form", m.dtn_difference, &["boundary_resolvent"]),
            ],
            1e-6,
            disc.clone(),
        ),
        IdentityReport::new(
            &format!("dtn_ratio_l{l}"),
            Some(z),
            vec![
                Side::new("one_minus_m_over_m0", ONE - m.d_ell, &["ode_radial"]),
                Side::new("b", m.b_ell, &["boundary_resolvent"]),
            ],
            1e-6,
            disc.clone(),
        ),
    ]
}

pub fn verify_mode_identities(
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    l_max: i64,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<Vec<IdentityReport>> {
    let modes = crate::disk::compute_modes(v, pt, l_max, grid, settings)?;
    let disc = disk_discretization(v, grid, l_max, 0.0);
    Ok(modes
        .iter()
        .flat_map(|m| mode_identity_reports(m, pt.z, &disc))
        .collect())
}

/// Operator whose Hilbert–Schmidt norm is tracked under refinement.
#[derive(Debug, Clone)]
pub enum HsSubject<'a> {
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HsReport {
    pub subject: String,
    pub z: C64,
    pub grid_sizes: Vec<usize>,
    pub norms: Vec<f64>,
    pub final_change: f64,
    pub plausible: bool,
}

impl HsReport {
    pub fn to_identity(&self) -> IdentityReport {
        let n = self.norms.len();
        let sides = self.norms[n.saturating_sub(2)..]
            .iter()
            .zip(&self.grid_sizes[n.saturating_sub(2)..])
            .map(|(&x, g)| Side::new(&format!("hs_norm_n{g}"), C64::new(x, 0.0), &["bs_nystrom"]))
            .collect();
        let disc = Discretization {
            grid_sizes: self.grid_sizes.clone(),
            ..Default::default()
        };
        let mut r = IdentityReport::new(
            &format!("hs_{}", self.subject),
            Some(self.z),
            sides,
            1e-4,
            disc,
        );
        if !self.plausible {
            r.fail("norm sequence is not Cauchy");
        }
        r
    }
}

/// Frobenius norms of the Birman–Schwinger matrix on `levels` doubled grids.
pub fn verify_hs_membership(
    subject: &HsSubject<'_>,
    pt: &SpectralPoint,
    levels: usize,
    settings: &Settings,
) -> Result<HsReport> {
    if levels < 3 {
        return Err(Error::Parameter(
            "HS diagnostic needs at least 3 levels".into(),
        ));
    }
    let policy = settings.policy;
    let mut norms = Vec::with_capacity(levels);
    let mut grid_sizes = Vec::with_capacity(levels);
    let name = match subject {
        HsSubject::Halfline { bc, .. } => format!("halfline_{}", bc.name()),
        HsSubject::DiskMode { ell, bc, .. } => format!("disk_l{ell}_{}", bc.name()),
    };
    for level in 0..levels {
        let panels = policy.panels_at(level);
        let (norm, n) = match subject {
            HsSubject::Halfline { v, bc } => {
                let grid = nystrom_grid(v, pt, panels, policy.nodes_per_panel)?;
                (bs_kernel(v, pt, *bc, &grid).frobenius_norm(), grid.len())
            }
            HsSubject::DiskMode { v, ell, bc } => {
                check_admissible(pt)?;
                let grid = v.grid(panels, policy.nodes_per_panel)?;
                let p = ModePipeline::new(*ell, v, pt, &grid, settings)?;
                (p.bs_matrix(*bc).frobenius_norm(), grid.len())
            }
        };
        norms.push(norm);
        grid_sizes.push(n);
    }
    let last = norms[levels - 1];
    let prev = norms[levels - 2];
    let final_change = if last == 0.0 && prev == 0.0 {
        0.0
    } else {
        (last - prev).abs() / last.max(prev)
    };
    let cauchy = norms
        .windows(3)
        .all(|w| (w[2] - w[1]).abs() <= (w[1] - w[0]).abs() + 1e-12 * w[2].max(1.0));
    Ok(HsReport {
        subject: name,
        z: pt.z,
        grid_sizes,
        norms,
        final_change,
        plausible: final_change <= 1e-4 && cauchy,
    })
}
