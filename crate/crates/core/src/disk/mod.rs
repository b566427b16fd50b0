//! The disk of radius R with a radially symmetric potential. Every
//! operator splits into independent blocks indexed by the angular Fourier
//! mode ℓ, and each block is a radial problem on L²((0, R); r dr).

mod assemble;
mod modes;
mod potential;
mod radial;

pub use assemble::{
    assemble_eq_4_37, assemble_theorem_4_2, compute_modes, hs_summability, DiskAssembly,
    ModeSumResult, ReciprocalAssembly, MODE_TAIL_TOLERANCE, STOP_THRESHOLD,
};
pub use modes::{
    boundary_bs_entry, dtn_difference_entry, mode_bs_det2, radial_green_kernel, trace_T2_mode,
    GreenKind, ModeData, ModePipeline,
};
pub use potential::RadialPotential2D;
pub use radial::{
    check_admissible, dtn_mode, ntd_mode, radial_boundary_solution, radial_regular_solution,
    radial_regular_solution_from, BoundarySolution, RegularSolution, MAX_MODE,
};
