//! Boundary scalars of the half-line: the one-point analogues of the
//! boundary Birman–Schwinger operators, assembled from resolvent matrices.

use super::green::{factors, free_kernel, nystrom_grid};
use super::{Bc, Potential1D, SpectralPoint};
use crate::error::Result;
use crate::numerics::linalg::Lu;
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::{ComplexMatrix, DeterminantKind, DeterminantResult, C64, I, ONE};
use crate::settings::Settings;

/// Resolvent-identity pipeline on one grid.
pub struct BoundaryPipeline {
    grid: QuadratureGrid,
    pot: Vec<C64>,
    u: Vec<C64>,
    v: Vec<C64>,
    green_d: ComplexMatrix,
    green_n: ComplexMatrix,
    lu_d: Lu,
    lu_n: Lu,
    /// y ↦ −∂ₓG_D(0, y), the Neumann trace of the free Dirichlet resolvent.
    row: Vec<C64>,
    /// y ↦ G_N(y, 0), the adjoint Dirichlet trace of the free Neumann resolvent.
    psi_n: Vec<C64>,
    pivot_threshold: f64,
}

impl BoundaryPipeline {
    pub fn new(
        v: &Potential1D,
        pt: &SpectralPoint,
        grid: QuadratureGrid,
        settings: &Settings,
    ) -> Result<Self> {
        let (u, vv) = factors(v, &grid);
        let pot: Vec<C64> = u.iter().zip(&vv).map(|(a, b)| a * b).collect();
        let green_d = free_kernel(Bc::Dirichlet, pt).operator_matrix(&grid);
        let green_n = free_kernel(Bc::Neumann, pt).operator_matrix(&grid);
        let lu_d = Lu::new(&green_d.scale_rows_cols(&u, &vv).plus_identity())?;
        let lu_n = Lu::new(&green_n.scale_rows_cols(&u, &vv).plus_identity())?;
        let k = pt.sqrt_z;
        let row = grid.nodes.iter().map(|&y| -(I * k * y).exp()).collect();
        let psi_n = grid
            .nodes
            .iter()
            .map(|&y| I * (I * k * y).exp() / k)
            .collect();
        Ok(Self {
            grid,
            pot,
            u,
            v: vv,
            green_d,
            green_n,
            lu_d,
            lu_n,
            row,
            psi_n,
            pivot_threshold: settings.pivot_threshold,
        })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    fn pair(&self, a: &[C64], b: &[C64]) -> C64 {
        (0..a.len())
            .map(|i| self.grid.weights[i] * a[i] * b[i])
            .sum()
    }

    /// (I + G V)⁻¹ h = h − G v (I + uGv)⁻¹ u h.
    fn dress(&self, green: &ComplexMatrix, lu: &Lu, h: &[C64]) -> Result<Vec<C64>> {
        let rhs: Vec<C64> = self.u.iter().zip(h).map(|(a, b)| a * b).collect();
        let y = lu.solve(&rhs, self.pivot_threshold)?;
        let vy: Vec<C64> = self.v.iter().zip(&y).map(|(a, b)| a * b).collect();
        let corr = green.mul_vec(&vy);
        Ok(h.iter().zip(&corr).map(|(a, b)| a - b).collect())
    }

    /// 1 − γ_N (H^D − z)⁻¹ V [γ_D (H₀^N − z̄)⁻¹]*.
    pub fn neumann_scalar(&self) -> Result<C64> {
        let g: Vec<C64> = self
            .pot
            .iter()
            .zip(&self.psi_n)
            .map(|(a, b)| a * b)
            .collect();
        // γ_N R_V g with R_V g = G_D (g − v y)
        let gh = self.green_d.mul_vec(&g);
        let rhs: Vec<C64> = self.u.iter().zip(&gh).map(|(a, b)| a * b).collect();
        let y = self.lu_d.solve(&rhs, self.pivot_threshold)?;
        let inner: Vec<C64> = (0..g.len()).map(|i| g[i] - self.v[i] * y[i]).collect();
        Ok(ONE - self.pair(&self.row, &inner))
    }

    /// 1 + γ_N (H₀^D − z)⁻¹ V [γ_D (H^N − z̄)⁻¹]*, the reciprocal scalar.
    pub fn dirichlet_scalar(&self) -> Result<C64> {
        // y ↦ G_V^N(y, 0), the perturbed Neumann kernel with one point on the boundary
        let psi_v = self.dress(&self.green_n, &self.lu_n, &self.psi_n)?;
        let vpsi: Vec<C64> = self.pot.iter().zip(&psi_v).map(|(a, b)| a * b).collect();
        Ok(ONE + self.pair(&self.row, &vpsi))
    }
}

fn refined(
    v: &Potential1D,
    pt: &SpectralPoint,
    settings: &Settings,
    which: Bc,
) -> Result<DeterminantResult> {
    let policy = settings.policy;
    DeterminantResult::refine(&policy, DeterminantKind::Det1, |panels| {
        let grid = nystrom_grid(v, pt, panels, policy.nodes_per_panel)?;
        let n = grid.len();
        let p = BoundaryPipeline::new(v, pt, grid, settings)?;
        let value = match which {
            Bc::Neumann => p.neumann_scalar()?,
            Bc::Dirichlet => p.dirichlet_scalar()?,
        };
        Ok((value, n))
    })
}

/// The boundary scalar whose zeros are Neumann eigenvalues; equals
/// m^D(z)/m₀^D(z).
pub fn boundary_scalar_1d(
    v: &Potential1D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<DeterminantResult> {
    refined(v, pt, settings, Bc::Neumann)
}

/// The reciprocal scalar whose zeros are Dirichlet eigenvalues; equals
/// m₀^D(z)/m^D(z).
pub fn dirichlet_boundary_scalar_1d(
    v: &Potential1D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<DeterminantResult> {
    refined(v, pt, settings, Bc::Dirichlet)
}
