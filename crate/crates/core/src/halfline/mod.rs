//! Half-line Schrödinger operators −d²/dx² + V on (0, ∞).

mod boundary;
mod green;
pub(crate) mod potential;
mod solutions;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::C64;

pub use boundary::{boundary_scalar_1d, dirichlet_boundary_scalar_1d, BoundaryPipeline};
pub use green::{
    bs_kernel, fredholm_det_halfline, free_green_kernel, free_kernel, nystrom_grid,
    BirmanSchwingerKernel,
};
pub use potential::{FactorizedPotential, Potential1D};
pub use solutions::{
    jost_solution, m_function, m_function_riccati, regular_solution_dirichlet,
    regular_solution_neumann, sample_grid, wronskian, SolutionSample, TAIL_BUDGET,
};

/// Boundary condition at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Dirichlet,
    Neumann,
}

impl Bc {
    pub fn name(self) -> &'static str {
        match self {
            Bc::Dirichlet => "dirichlet",
            Bc::Neumann => "neumann",
        }
    }
}

/// Energy z off [0, ∞) together with k = √z, Im k > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub z: C64,
    pub sqrt_z: C64,
}

impl SpectralPoint {
    pub fn new(z: C64) -> Result<Self> {
        sqrt_principal(z)
    }

    pub fn k(&self) -> C64 {
        self.sqrt_z
    }

    /// Distance from z to the ray [0, ∞).
    pub fn distance_to_ray(z: C64) -> f64 {
        if z.re >= 0.0 {
            z.im.abs()
        } else {
            z.norm()
        }
    }
}

/// Square root branch with positive imaginary part.
pub fn sqrt_principal(z: C64) -> Result<SpectralPoint> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Parameter("z must be finite".into()));
    }
    if SpectralPoint::distance_to_ray(z) <= 1e-12 * (1.0 + z.norm()) {
        return Err(Error::Domain { z });
    }
    let mut k = z.sqrt();
    if k.im < 0.0 {
        k = -k;
    }
    Ok(SpectralPoint { z, sqrt_z: k })
}
