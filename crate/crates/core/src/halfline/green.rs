use super::potential::split;
use super::{Bc, Potential1D, SpectralPoint};
use crate::error::Result;
use crate::kernel::{graded_edges, BsDiscretization, SemiseparableKernel};
use crate::numerics::quadrature::{QuadratureGrid, WeightKind};
use crate::numerics::{
    ComplexMatrix, DeterminantKind, DeterminantResult, RefinementPolicy, C64, I,
};

/// Kernel of (H₀ − z)⁻¹ on the half-line for the given boundary condition.
pub fn free_green_kernel(bc: Bc, pt: &SpectralPoint, x: f64, y: f64) -> C64 {
    free_kernel(bc, pt).eval(x, y)
}

/// Semiseparable form with gauge κx, κ = Im k, so that every factor stays
/// bounded on long intervals.
pub fn free_kernel(bc: Bc, pt: &SpectralPoint) -> SemiseparableKernel<'static> {
    let k = pt.sqrt_z;
    let kappa = k.im;
    let grow = move |x: f64| ((I * k - kappa) * x).exp();
    let flat = move |x: f64| ((-I * k - kappa) * x).exp();
    let beta = move |x: f64| ((I * k + kappa) * x).exp();
    match bc {
        // sin(kx)/k · e^{ik x>}, Wronskian normalisation 1
        Bc::Dirichlet => SemiseparableKernel::new(
            move |x| (grow(x) - flat(x)) / (2.0 * I * k),
            beta,
            move |x| kappa * x,
            C64::new(1.0, 0.0),
        ),
        // cos(kx) · e^{ik x>} / (−ik)
        Bc::Neumann => SemiseparableKernel::new(
            move |x| 0.5 * (grow(x) + flat(x)),
            beta,
            move |x| kappa * x,
            -I * k,
        ),
    }
}

/// Nyström grid on (0, x_max): panels graded by √|V|, split at the
/// potential's breakpoints, at most 3/Im k wide.
pub fn nystrom_grid(
    v: &Potential1D,
    pt: &SpectralPoint,
    n_panels: usize,
    nodes_per_panel: usize,
) -> Result<QuadratureGrid> {
    let max_width = 3.0 / pt.sqrt_z.im;
    let edges = graded_edges(
        0.0,
        v.x_max,
        n_panels,
        |x| v.eval(x).norm().sqrt(),
        &v.breakpoints,
        max_width,
    );
    QuadratureGrid::from_edges(&edges, nodes_per_panel, WeightKind::Lebesgue)
}

pub(crate) fn factors(v: &Potential1D, grid: &QuadratureGrid) -> (Vec<C64>, Vec<C64>) {
    grid.nodes.iter().map(|&x| split(v.eval(x))).unzip()
}

/// Weight-symmetrized Nyström matrix of u(H₀ − z)⁻¹v.
#[derive(Debug, Clone)]
pub struct BirmanSchwingerKernel {
    pub matrix: ComplexMatrix,
    pub bc: Bc,
    pub point: SpectralPoint,
    pub grid: QuadratureGrid,
    pub(crate) parts: BsDiscretization,
}

impl BirmanSchwingerKernel {
    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.frobenius_norm()
    }

    /// ∫ V(x) G(x, x) dx by direct quadrature of the diagonal.
    pub fn trace(&self) -> C64 {
        self.parts.trace
    }

    pub fn det(&self) -> Result<C64> {
        self.parts.det()
    }

    pub fn det2(&self) -> Result<C64> {
        self.parts.det2()
    }
}

pub fn bs_kernel(
    v: &Potential1D,
    pt: &SpectralPoint,
    bc: Bc,
    grid: &QuadratureGrid,
) -> BirmanSchwingerKernel {
    let (u, vv) = factors(v, grid);
    let parts = BsDiscretization::new(&free_kernel(bc, pt), grid, &u, &vv);
    BirmanSchwingerKernel {
        matrix: parts.symmetric.clone(),
        bc,
        point: *pt,
        grid: grid.clone(),
        parts,
    }
}

/// det(I + u(H₀ − z)⁻¹v) on a doubling grid sequence.
pub fn fredholm_det_halfline(
    v: &Potential1D,
    pt: &SpectralPoint,
    bc: Bc,
    policy: &RefinementPolicy,
) -> Result<DeterminantResult> {
    DeterminantResult::refine(policy, DeterminantKind::Det1, |panels| {
        let grid = nystrom_grid(v, pt, panels, policy.nodes_per_panel)?;
        let k = bs_kernel(v, pt, bc, &grid);
        Ok((k.det()?, grid.len()))
    })?
    .require_converged()
}
