//! Per-mode Green kernels, Birman–Schwinger determinants and boundary
//! operator entries.
//!
//! Boundary functions are expressed in the orthonormal mode e^{iℓθ}/√(2πR)
//! of L²(∂Ω; dσ) and interior functions in e^{iℓθ}/√(2π) of L²(r dr dθ).
//! With this convention the Neumann trace of the free Dirichlet resolvent
//! is the weighted row r' ↦ √R ∂_r G_D(R, r'), and the adjoint of the
//! Dirichlet trace of the free Neumann resolvent is the column
//! r' ↦ √R G_N(r', R).

use serde::{Deserialize, Serialize};

use super::potential::RadialPotential2D;
use super::radial::{
    check_admissible, mode_order, ntd_mode, radial_boundary_solution, radial_regular_solution,
    BoundarySolution, RegularSolution,
};
use crate::error::{finite, Error, Result};
use crate::halfline::potential::split;
use crate::halfline::{Bc, SpectralPoint};
use crate::kernel::{BsDiscretization, SemiseparableKernel};
use crate::numerics::linalg::Lu;
use crate::numerics::quadrature::{QuadratureGrid, WeightKind};
use crate::numerics::{ComplexMatrix, C64, ONE};
use crate::settings::Settings;

const POLE_FLOOR: f64 = 1e-12;

/// Which resolvent a radial kernel belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreenKind {
    Free,
    Perturbed,
}

/// r-weighted Wronskian C = r(u_reg' u_bc − u_reg u_bc') of the scaled pair.
fn wronskian_at_boundary(reg: &RegularSolution, bc: Bc) -> Result<C64> {
    let (a, da) = reg.at_boundary();
    let r = reg.radius;
    let c = match bc {
        Bc::Dirichlet => -r * a,
        Bc::Neumann => reg.ell as f64 * a + r * da,
    };
    if c.norm() < POLE_FLOOR {
        return Err(Error::Pole {
            what: "radial Wronskian",
            magnitude: c.norm(),
        });
    }
    Ok(c)
}

/// G_ℓ(r, r') = (r</r>)^ℓ α(r<) β(r>)/C in semiseparable form with gauge ℓ ln r.
fn mode_kernel<'a>(
    reg: &'a RegularSolution,
    bnd: &'a BoundarySolution,
) -> Result<SemiseparableKernel<'a>> {
    let c = wronskian_at_boundary(reg, bnd.bc)?;
    let l = reg.ell as f64;
    Ok(SemiseparableKernel::new(
        move |r| reg.alpha(r),
        move |r| bnd.beta(r),
        move |r| l * r.ln(),
        c,
    ))
}

fn solutions(
    ell: i64,
    bc: Bc,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<(RegularSolution, BoundarySolution)> {
    Ok((
        radial_regular_solution(ell, v, pt, settings)?,
        radial_boundary_solution(ell, bc, v, pt, settings)?,
    ))
}

/// Kernel of the mode-ℓ block of (H₀ − z)⁻¹ or (H − z)⁻¹ on L²((0, R); r dr)
/// with the given boundary condition at R.
#[allow(clippy::too_many_arguments)]
pub fn radial_green_kernel(
    ell: i64,
    bc: Bc,
    kind: GreenKind,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    r: f64,
    r_prime: f64,
    settings: &Settings,
) -> Result<C64> {
    let radius = v.radius;
    if !(r > 0.0 && r < radius && r_prime > 0.0 && r_prime < radius) {
        return Err(Error::Parameter(format!(
            "radii ({r}, {r_prime}) outside (0, R)"
        )));
    }
    let free;
    let pot = match kind {
        GreenKind::Free => {
            free = RadialPotential2D::zero(radius)?;
            &free
        }
        GreenKind::Perturbed => v,
    };
    let (reg, bnd) = solutions(ell, bc, pot, pt, settings)?;
    let value = mode_kernel(&reg, &bnd)?.eval(r, r_prime);
    Ok(value)
}

fn check_grid(grid: &QuadratureGrid, v: &RadialPotential2D) -> Result<()> {
    if grid.weight_kind != WeightKind::Radial {
        return Err(Error::Parameter(
            "disk modes need a grid with radial weights".into(),
        ));
    }
    if grid.a() != 0.0 || (grid.b() - v.radius).abs() > 1e-12 * v.radius {
        return Err(Error::Parameter("disk grid must cover (0, R)".into()));
    }
    Ok(())
}

/// All discretized operators of one mode on one radial grid.
pub struct ModePipeline {
    pub ell: i64,
    pub grid: QuadratureGrid,
    pot: Vec<C64>,
    u: Vec<C64>,
    v: Vec<C64>,
    bs_d: BsDiscretization,
    bs_n: BsDiscretization,
    lu_d: Lu,
    lu_n: Lu,
    /// r' ↦ √R ∂_r G_D(R, r'), the Neumann trace of the free Dirichlet resolvent.
    row: Vec<C64>,
    /// r' ↦ √R G_N(r', R), the adjoint Dirichlet trace of the free Neumann resolvent.
    psi_n: Vec<C64>,
    pivot_threshold: f64,
}

impl ModePipeline {
    pub fn new(
        ell: i64,
        v: &RadialPotential2D,
        pt: &SpectralPoint,
        grid: &QuadratureGrid,
        settings: &Settings,
    ) -> Result<Self> {
        check_admissible(pt)?;
        check_grid(grid, v)?;
        let l = mode_order(ell)? as i32;
        let radius = v.radius;
        let free = RadialPotential2D::zero(radius)?;
        let reg0 = radial_regular_solution(ell, &free, pt, settings)?;
        let bnd_d = radial_boundary_solution(ell, Bc::Dirichlet, &free, pt, settings)?;
        let bnd_n = radial_boundary_solution(ell, Bc::Neumann, &free, pt, settings)?;
        let (u, vv): (Vec<C64>, Vec<C64>) = grid.nodes.iter().map(|&r| split(v.eval(r))).unzip();
        let pot: Vec<C64> = u.iter().zip(&vv).map(|(a, b)| a * b).collect();
        let bs_d = BsDiscretization::new(&mode_kernel(&reg0, &bnd_d)?, grid, &u, &vv);
        let bs_n = BsDiscretization::new(&mode_kernel(&reg0, &bnd_n)?, grid, &u, &vv);
        let lu_d = Lu::new(&bs_d.kernel.plus_identity())?;
        let lu_n = Lu::new(&bs_n.kernel.plus_identity())?;
        let a_r = reg0.at_boundary().0;
        let c_n = wronskian_at_boundary(&reg0, Bc::Neumann)?;
        let sr = radius.sqrt();
        let row = grid
            .nodes
            .iter()
            .map(|&r| -(r / radius).powi(l) * reg0.alpha(r) / (sr * a_r))
            .collect();
        let psi_n = grid
            .nodes
            .iter()
            .map(|&r| sr * (r / radius).powi(l) * reg0.alpha(r) / c_n)
            .collect();
        Ok(Self {
            ell,
            grid: grid.clone(),
            pot,
            u,
            v: vv,
            bs_d,
            bs_n,
            lu_d,
            lu_n,
            row,
            psi_n,
            pivot_threshold: settings.pivot_threshold,
        })
    }

    fn pair(&self, a: &[C64], b: &[C64]) -> C64 {
        (0..a.len())
            .map(|i| self.grid.weights[i] * a[i] * b[i])
            .sum()
    }

    fn times_pot(&self, h: &[C64]) -> Vec<C64> {
        self.pot.iter().zip(h).map(|(a, b)| a * b).collect()
    }

    /// y = (I + u G v)⁻¹ u G g and the corrected density g − v y, so that
    /// (H − z)⁻¹ g = G (g − v y).
    fn corrected(&self, bc: Bc, g: &[C64]) -> Result<Vec<C64>> {
        let (green, lu) = match bc {
            Bc::Dirichlet => (&self.bs_d.green, &self.lu_d),
            Bc::Neumann => (&self.bs_n.green, &self.lu_n),
        };
        let gh = green.mul_vec(g);
        let rhs: Vec<C64> = self.u.iter().zip(&gh).map(|(a, b)| a * b).collect();
        let y = lu.solve(&rhs, self.pivot_threshold)?;
        Ok((0..g.len()).map(|i| g[i] - self.v[i] * y[i]).collect())
    }

    fn green(&self, bc: Bc) -> &ComplexMatrix {
        match bc {
            Bc::Dirichlet => &self.bs_d.green,
            Bc::Neumann => &self.bs_n.green,
        }
    }

    /// (H − z)⁻¹ g at the nodes.
    pub fn perturbed_resolvent(&self, bc: Bc, g: &[C64]) -> Result<Vec<C64>> {
        Ok(self.green(bc).mul_vec(&self.corrected(bc, g)?))
    }

    /// (I + G V)⁻¹ h = h − G v (I + u G v)⁻¹ u h.
    fn dress(&self, bc: Bc, h: &[C64]) -> Result<Vec<C64>> {
        let lu = if bc == Bc::Dirichlet {
            &self.lu_d
        } else {
            &self.lu_n
        };
        let rhs: Vec<C64> = self.u.iter().zip(h).map(|(a, b)| a * b).collect();
        let y = lu.solve(&rhs, self.pivot_threshold)?;
        let vy: Vec<C64> = self.v.iter().zip(&y).map(|(a, b)| a * b).collect();
        let corr = self.green(bc).mul_vec(&vy);
        Ok(h.iter().zip(&corr).map(|(a, b)| a - b).collect())
    }

    pub fn det2(&self, bc: Bc) -> Result<C64> {
        match bc {
            Bc::Dirichlet => self.bs_d.det2(),
            Bc::Neumann => self.bs_n.det2(),
        }
    }

    /// ∫ V G(r, r) r dr for the free kernel with boundary condition `bc`.
    pub fn trace(&self, bc: Bc) -> C64 {
        match bc {
            Bc::Dirichlet => self.bs_d.trace,
            Bc::Neumann => self.bs_n.trace,
        }
    }

    /// Weight-symmetrized Birman–Schwinger matrix.
    pub fn bs_matrix(&self, bc: Bc) -> &ComplexMatrix {
        match bc {
            Bc::Dirichlet => &self.bs_d.symmetric,
            Bc::Neumann => &self.bs_n.symmetric,
        }
    }

    /// Mode entry b_ℓ of γ_N (H^D − z)⁻¹ V [γ_D (H₀^N − z̄)⁻¹]*.
    pub fn boundary_entry(&self) -> Result<C64> {
        let g = self.times_pot(&self.psi_n);
        Ok(self.pair(&self.row, &self.corrected(Bc::Dirichlet, &g)?))
    }

    /// Mode entry of γ_N (H^D − z)⁻¹ V [γ_N ((H₀^D − z)⁻¹)*]*, which equals
    /// m₀,ℓ − m_ℓ.
    pub fn dtn_difference(&self) -> Result<C64> {
        let g = self.times_pot(&self.row);
        Ok(self.pair(&self.row, &self.corrected(Bc::Dirichlet, &g)?))
    }

    /// Mode entry of γ_N (H₀^D − z)⁻¹ V (H^D − z)⁻¹ V [γ_D (H₀^N − z̄)⁻¹]*.
    pub fn trace_term(&self) -> Result<C64> {
        let g = self.times_pot(&self.psi_n);
        let h = self.perturbed_resolvent(Bc::Dirichlet, &g)?;
        Ok(self.pair(&self.row, &self.times_pot(&h)))
    }

    /// Mode entry of γ_N (H₀^D − z)⁻¹ V [γ_D (H^N − z̄)⁻¹]*.
    pub fn reciprocal_entry(&self) -> Result<C64> {
        let psi_v = self.dress(Bc::Neumann, &self.psi_n)?;
        Ok(self.pair(&self.row, &self.times_pot(&psi_v)))
    }

    /// Mode entry of γ_N (H₀^D − z)⁻¹ V (H^N − z)⁻¹ V [γ_D (H₀^N − z̄)⁻¹]*.
    pub fn reciprocal_trace_term(&self) -> Result<C64> {
        let g = self.times_pot(&self.psi_n);
        let h = self.perturbed_resolvent(Bc::Neumann, &g)?;
        Ok(self.pair(&self.row, &self.times_pot(&h)))
    }

    pub fn row(&self) -> &[C64] {
        &self.row
    }

    pub fn psi_n(&self) -> &[C64] {
        &self.psi_n
    }
}

/// Everything computed for one angular mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeData {
    pub ell: i64,
    pub m_ell: C64,
    pub m0_ell: C64,
    pub n_ell: C64,
    pub d_ell: C64,
    pub b_ell: C64,
    pub dtn_difference: C64,
    pub det2_d_ell: C64,
    pub det2_n_ell: C64,
    pub tau_ell: C64,
    /// Entry of the boundary operator with the roles of D and N swapped.
    pub c_ell: C64,
    /// Trace-term entry with the roles of D and N swapped.
    pub tau_prime_ell: C64,
    pub trace_d: C64,
    pub trace_n: C64,
}

impl ModeData {
    pub fn compute(
        ell: i64,
        v: &RadialPotential2D,
        pt: &SpectralPoint,
        grid: &QuadratureGrid,
        settings: &Settings,
    ) -> Result<Self> {
        Self::compute_inner(ell, v, pt, grid, settings).map_err(|e| Error::Mode {
            ell,
            source: Box::new(e),
        })
    }

    fn compute_inner(
        ell: i64,
        v: &RadialPotential2D,
        pt: &SpectralPoint,
        grid: &QuadratureGrid,
        settings: &Settings,
    ) -> Result<Self> {
        let m_ell = radial_regular_solution(ell, v, pt, settings)?.dtn()?;
        let free = RadialPotential2D::zero(v.radius)?;
        let m0_ell = radial_regular_solution(ell, &free, pt, settings)?.dtn()?;
        let n_ell = ntd_mode(ell, v, pt, settings)?;
        let p = ModePipeline::new(ell, v, pt, grid, settings)?;
        let out = Self {
            ell,
            m_ell,
            m0_ell,
            n_ell,
            d_ell: finite(m_ell / m0_ell, "DtN ratio")?,
            b_ell: p.boundary_entry()?,
            dtn_difference: p.dtn_difference()?,
            det2_d_ell: p.det2(Bc::Dirichlet)?,
            det2_n_ell: p.det2(Bc::Neumann)?,
            tau_ell: p.trace_term()?,
            c_ell: p.reciprocal_entry()?,
            tau_prime_ell: p.reciprocal_trace_term()?,
            trace_d: p.trace(Bc::Dirichlet),
            trace_n: p.trace(Bc::Neumann),
        };
        Ok(out)
    }

    /// det₂ ratio N over D.
    pub fn det2_ratio(&self) -> C64 {
        self.det2_n_ell / self.det2_d_ell
    }

    /// (1 − b) e^{b} e^{τ}.
    pub fn boundary_factor(&self) -> C64 {
        (ONE - self.b_ell) * (self.b_ell + self.tau_ell).exp()
    }

    /// d e^{1 − d} e^{τ}.
    pub fn dtn_factor(&self) -> C64 {
        self.d_ell * (ONE - self.d_ell + self.tau_ell).exp()
    }

    /// (1 + c) e^{−c} e^{−τ'}.
    pub fn reciprocal_boundary_factor(&self) -> C64 {
        (ONE + self.c_ell) * (-self.c_ell - self.tau_prime_ell).exp()
    }

    pub fn abs_d_minus_1(&self) -> f64 {
        (self.d_ell - 1.0).norm()
    }
}

fn with_mode<T>(ell: i64, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Mode {
        ell,
        source: Box::new(e),
    })
}

/// det₂(I + K_ℓ) with K_ℓ the mode-ℓ Birman–Schwinger operator u G₀,ℓ v.
pub fn mode_bs_det2(
    ell: i64,
    bc: Bc,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<C64> {
    with_mode(
        ell,
        ModePipeline::new(ell, v, pt, grid, settings).and_then(|p| p.det2(bc)),
    )
}

/// b_ℓ, the mode entry of the boundary Birman–Schwinger operator.
pub fn boundary_bs_entry(
    ell: i64,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<C64> {
    with_mode(
        ell,
        ModePipeline::new(ell, v, pt, grid, settings).and_then(|p| p.boundary_entry()),
    )
}

/// Trace-operator form of m₀,ℓ − m_ℓ.
pub fn dtn_difference_entry(
    ell: i64,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<C64> {
    with_mode(
        ell,
        ModePipeline::new(ell, v, pt, grid, settings).and_then(|p| p.dtn_difference()),
    )
}

/// τ_ℓ, the mode contribution to the trace of T₂(z).
#[allow(non_snake_case)]
pub fn trace_T2_mode(
    ell: i64,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    grid: &QuadratureGrid,
    settings: &Settings,
) -> Result<C64> {
    with_mode(
        ell,
        ModePipeline::new(ell, v, pt, grid, settings).and_then(|p| p.trace_term()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ZERO;

    fn pt(z: f64) -> SpectralPoint {
        SpectralPoint::new(C64::new(z, 0.0)).unwrap()
    }

    fn bump() -> RadialPotential2D {
        RadialPotential2D::gaussian(-4.0, 1.0 / 8f64.sqrt(), 1.0).unwrap()
    }

    fn grid(v: &RadialPotential2D, n: usize) -> QuadratureGrid {
        v.grid(n, 25).unwrap()
    }

    #[test]
    fn green_kernel_symmetry_and_boundary_value() {
        let v = bump();
        let s = Settings::default();
        let p = pt(-2.0);
        for kind in [GreenKind::Free, GreenKind::Perturbed] {
            for bc in [Bc::Dirichlet, Bc::Neumann] {
                let a = radial_green_kernel(2, bc, kind, &v, &p, 0.3, 0.7, &s).unwrap();
                let b = radial_green_kernel(2, bc, kind, &v, &p, 0.7, 0.3, &s).unwrap();
                assert!((a - b).norm() < 1e-12 * a.norm());
            }
            let edge =
                radial_green_kernel(1, Bc::Dirichlet, kind, &v, &p, 0.4, 1.0 - 1e-12, &s).unwrap();
            assert!(edge.norm() < 1e-10);
        }
    }

    #[test]
    fn green_kernel_inverts_the_radial_operator_weakly() {
        // g = r^ℓ (1 − r²)² meets both boundary conditions at R = 1, and
        // (−∂²−∂/r+ℓ²/r²) g = r^ℓ (8(ℓ+1) − (8ℓ+16) r²).
        let free = RadialPotential2D::zero(1.0).unwrap();
        let s = Settings::default();
        let p = SpectralPoint::new(C64::new(-1.5, 0.7)).unwrap();
        let z = p.z;
        let g = free.grid(6, 20).unwrap();
        for ell in [0usize, 1, 4] {
            let l = ell as f64;
            let reg = radial_regular_solution(ell as i64, &free, &p, &s).unwrap();
            for bc in [Bc::Dirichlet, Bc::Neumann] {
                let bnd = radial_boundary_solution(ell as i64, bc, &free, &p, &s).unwrap();
                let a = mode_kernel(&reg, &bnd).unwrap().operator_matrix(&g);
                let test = |r: f64| r.powi(ell as i32) * (1.0 - r * r).powi(2);
                let h: Vec<C64> = g
                    .nodes
                    .iter()
                    .map(|&r| {
                        r.powi(ell as i32) * (8.0 * (l + 1.0) - (8.0 * l + 16.0) * r * r)
                            - z * test(r)
                    })
                    .collect();
                let out = a.mul_vec(&h);
                for (i, &r) in g.nodes.iter().enumerate() {
                    assert!(
                        (out[i] - test(r)).norm() < 1e-9,
                        "ell {ell} {bc:?} r {r} err {}",
                        (out[i] - test(r)).norm()
                    );
                }
            }
        }
    }

    #[test]
    fn free_potential_gives_trivial_entries() {
        let v = RadialPotential2D::zero(1.0).unwrap();
        let g = grid(&v, 4);
        let d = ModeData::compute(3, &v, &pt(-2.0), &g, &Settings::default()).unwrap();
        assert_eq!(d.b_ell, ZERO);
        assert_eq!(d.tau_ell, ZERO);
        assert_eq!(d.det2_d_ell, ONE);
        assert_eq!(d.d_ell, ONE);
    }

    #[test]
    fn boundary_entries_match_dtn_identities() {
        let v = bump();
        let g = grid(&v, 8);
        let s = Settings::default();
        for z in [C64::new(-2.0, 0.0), C64::new(-1.0, 1.0)] {
            let p = SpectralPoint::new(z).unwrap();
            for ell in [0i64, 1, 2, 10, 20] {
                let d = ModeData::compute(ell, &v, &p, &g, &s).unwrap();
                assert!(
                    (d.d_ell - (ONE - d.b_ell)).norm() < 1e-8,
                    "ell {ell}: d {} b {}",
                    d.d_ell,
                    d.b_ell
                );
                assert!((d.m0_ell - d.m_ell - d.dtn_difference).norm() < 1e-8 * d.m0_ell.norm());
                assert!(((ONE + d.c_ell) * d.d_ell - 1.0).norm() < 1e-8);
                assert!((d.n_ell * d.m_ell + 1.0).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn per_mode_products_agree() {
        let v = bump();
        let g = grid(&v, 8);
        let s = Settings::default();
        for z in [-1.0, -2.0, -4.0] {
            for ell in [0i64, 1, 3, 15, 40] {
                let d = ModeData::compute(ell, &v, &pt(z), &g, &s).unwrap();
                let q1 = d.det2_ratio();
                assert!(
                    (q1 - d.boundary_factor()).norm() < 1e-9,
                    "ell {ell}: {q1} vs {}",
                    d.boundary_factor()
                );
                assert!((q1 - d.dtn_factor()).norm() < 1e-9);
                assert!((q1 * d.reciprocal_boundary_factor() - 1.0).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn boundary_entry_matches_perturbed_kernel_quadrature() {
        // b = Σ w (√R ∂_r G_V^D(R, r)) V(r) ψ_N(r), with the perturbed row
        // taken directly from the perturbed regular solution.
        let v = bump();
        let s = Settings::default();
        let p = pt(-2.0);
        let g = grid(&v, 16);
        for ell in [0i64, 2, 7] {
            let reg = radial_regular_solution(ell, &v, &p, &s).unwrap();
            let a_r = reg.at_boundary().0;
            let pipe = ModePipeline::new(ell, &v, &p, &g, &s).unwrap();
            let want: C64 = (0..g.len())
                .map(|i| {
                    let r = g.nodes[i];
                    let row_v = -r.powi(ell as i32) * reg.alpha(r) / a_r;
                    g.weights[i] * row_v * v.eval(r) * pipe.psi_n()[i]
                })
                .sum();
            let b = boundary_bs_entry(ell, &v, &p, &grid(&v, 8), &s).unwrap();
            assert!((b - want).norm() < 1e-10, "ell {ell}: {b} vs {want}");
        }
    }

    #[test]
    fn trace_term_matches_perturbed_kernel_quadrature() {
        let v = bump();
        let s = Settings::default();
        let p = pt(-2.0);
        let fine = grid(&v, 16);
        for ell in [0i64, 3] {
            let (reg, bnd) = solutions(ell, Bc::Dirichlet, &v, &p, &s).unwrap();
            let a = mode_kernel(&reg, &bnd).unwrap().operator_matrix(&fine);
            let pipe = ModePipeline::new(ell, &v, &p, &fine, &s).unwrap();
            let g: Vec<C64> = (0..fine.len())
                .map(|i| v.eval(fine.nodes[i]) * pipe.psi_n()[i])
                .collect();
            let h = a.mul_vec(&g);
            let want: C64 = (0..fine.len())
                .map(|i| fine.weights[i] * pipe.row()[i] * v.eval(fine.nodes[i]) * h[i])
                .sum();
            let tau = trace_T2_mode(ell, &v, &p, &grid(&v, 8), &s).unwrap();
            assert!(
                (tau - want).norm() < 1e-10 * want.norm().max(1e-3),
                "ell {ell}: {tau} vs {want}"
            );
        }
    }

    #[test]
    fn trace_term_is_second_order() {
        let v = bump();
        let s = Settings::default();
        let g = grid(&v, 8);
        let p = pt(-2.0);
        for ell in [5i64, 10] {
            let taus: Vec<C64> = [1.0, 0.5, 0.25]
                .iter()
                .map(|&e| trace_T2_mode(ell, &v.scaled(e), &p, &g, &s).unwrap())
                .collect();
            for w in taus.windows(2) {
                let ratio = (w[0] / w[1]).norm();
                assert!((ratio - 4.0).abs() < 0.02 * 4.0, "ell {ell}: ratio {ratio}");
            }
        }
        // at ℓ = 0 the cubic term is visible at full strength but fades
        let taus: Vec<C64> = [0.25, 0.125, 0.0625]
            .iter()
            .map(|&e| trace_T2_mode(0, &v.scaled(e), &p, &g, &s).unwrap())
            .collect();
        let r: Vec<f64> = taus.windows(2).map(|w| (w[0] / w[1]).norm()).collect();
        assert!(
            (r[1] - 4.0).abs() < (r[0] - 4.0).abs() && (r[1] - 4.0).abs() < 0.02 * 4.0,
            "{r:?}"
        );
    }

    #[test]
    fn det2_against_doubled_grid() {
        let v = bump();
        let s = Settings::default();
        let p = pt(-2.0);
        for bc in [Bc::Dirichlet, Bc::Neumann] {
            let a = mode_bs_det2(0, bc, &v, &p, &grid(&v, 8), &s).unwrap();
            let b = mode_bs_det2(0, bc, &v, &p, &grid(&v, 16), &s).unwrap();
            assert!((a - b).norm() < 1e-10, "{bc:?}: {a} vs {b}");
        }
    }

    #[test]
    fn mode_failures_carry_the_mode() {
        let v = bump();
        let g = v.grid(4, 8).unwrap();
        let e = ModeData::compute(900, &v, &pt(-1.0), &g, &Settings::default()).unwrap_err();
        assert!(matches!(e, Error::Mode { ell: 900, .. }));
        let bad =
            crate::numerics::gauss_legendre_panels(0.0, 1.0, 4, 8, WeightKind::Lebesgue).unwrap();
        assert!(mode_bs_det2(0, Bc::Dirichlet, &v, &pt(-1.0), &bad, &Settings::default()).is_err());
    }
}
