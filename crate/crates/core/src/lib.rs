//! Numerical Fredholm-determinant identities for Schrödinger operators on
//! the half-line and on the disk.
//!
//! The crate computes Jost solutions, Weyl–Titchmarsh m-functions,
//! Birman–Schwinger determinants and Dirichlet-to-Neumann maps, and checks
//! the determinant identities that tie them together:
//!
//! * [`numerics`]: quadrature, dense LU, det/det₂ engines, adaptive ODE solver.
//! * [`kernel`]: product-integration Nyström discretization of Green kernels.
//! * [`halfline`]: regular and Jost solutions, Green kernels, boundary scalars.
//! * [`disk`]: angular-mode reduction for radial potentials on a disk.
//! * [`verify`]: identity reports and Birman–Schwinger eigenvalue scans.
//! * [`cli`]: configuration and report emission for the `detlab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod disk;
pub mod error;
pub mod halfline;
pub mod kernel;
pub mod numerics;
pub mod report;
pub mod settings;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::C64;
pub use report::{Discretization, IdentityReport, Side};
pub use settings::Settings;
