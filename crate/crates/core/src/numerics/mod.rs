//! Quadrature, dense complex linear algebra, determinant engines and the
//! ODE integrator.

pub mod determinant;
pub mod linalg;
pub mod ode;
pub mod quadrature;

pub use num_complex::Complex64 as C64;

pub use determinant::{DeterminantKind, DeterminantResult, RefinementPolicy};
pub use linalg::{
    commuted_det_identity_check, det2_from_matrix, det_lu, solve_linear, ComplexMatrix, Lu,
};
pub use ode::{ode_second_order, SecondOrderSolution};
pub use quadrature::{gauss_legendre_panels, QuadratureGrid, WeightKind};

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
