//! Per-mode radial problem −u'' − u'/r + (ℓ²/r² + V − z)u = 0 on (0, R).
//!
//! Solutions are carried in scaled form: the regular one as u = r^ℓ α and
//! the boundary one as u = r^{−ℓ} β, so that α and β stay of moderate size
//! for every ℓ.

use super::potential::RadialPotential2D;
use crate::error::{finite, Error, Result};
use crate::halfline::{Bc, SpectralPoint};
use crate::numerics::ode::{integrate, Trajectory};
use crate::numerics::{C64, ONE, ZERO};
use crate::settings::Settings;

pub const MAX_MODE: i64 = 512;
/// Launch radius of the regular solution as a fraction of R.
pub const LAUNCH_FRACTION: f64 = 1e-6;
const POLE_FLOOR: f64 = 1e-12;

pub(crate) fn mode_order(ell: i64) -> Result<usize> {
    if ell.abs() > MAX_MODE {
        return Err(Error::ModeRange(ell));
    }
    Ok(ell.unsigned_abs() as usize)
}

/// z on the negative real axis, or at distance ≥ 0.5 from [0, ∞).
pub fn check_admissible(pt: &SpectralPoint) -> Result<()> {
    let z = pt.z;
    if (z.im == 0.0 && z.re < 0.0) || SpectralPoint::distance_to_ray(z) >= 0.5 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "z = {z} outside the admissible disk region"
        )))
    }
}

/// Regular solution u = r^ℓ α with α(0) = 1.
#[derive(Debug, Clone)]
pub struct RegularSolution {
    pub ell: usize,
    pub radius: f64,
    pub r0: f64,
    /// Second Frobenius coefficient: α ≈ 1 + c r² near the origin.
    pub c: C64,
    traj: Trajectory<2>,
}

impl RegularSolution {
    /// (α, α') at r.
    pub fn scaled(&self, r: f64) -> (C64, C64) {
        if r <= self.r0 {
            (ONE + self.c * r * r, 2.0 * self.c * r)
        } else {
            let s = self.traj.eval(r);
            (s[0], s[1])
        }
    }

    pub fn alpha(&self, r: f64) -> C64 {
        self.scaled(r).0
    }

    /// (u, u') at r.
    pub fn eval(&self, r: f64) -> (C64, C64) {
        let (a, da) = self.scaled(r);
        let l = self.ell as i32;
        let p = r.powi(l);
        let dp = if l == 0 {
            0.0
        } else {
            l as f64 * r.powi(l - 1)
        };
        (p * a, dp * a + p * da)
    }

    /// (α(R), α'(R)).
    pub fn at_boundary(&self) -> (C64, C64) {
        let s = self.traj.end().1;
        (s[0], s[1])
    }

    /// −u'(R)/u(R).
    pub fn dtn(&self) -> Result<C64> {
        let (a, da) = self.at_boundary();
        if a.norm() < POLE_FLOOR {
            return Err(Error::Pole {
                what: "u(R)",
                magnitude: a.norm(),
            });
        }
        finite(-(self.ell as f64 / self.radius + da / a), "DtN eigenvalue")
    }
}

/// Boundary solution u = r^{−ℓ} β satisfying the boundary condition at R,
/// normalised by β(R) = 0, β'(R) = 1 (Dirichlet) or β(R) = 1,
/// β'(R) = ℓ/R (Neumann).
#[derive(Debug, Clone)]
pub struct BoundarySolution {
    pub ell: usize,
    pub bc: Bc,
    pub radius: f64,
    pub r0: f64,
    traj: Trajectory<2>,
}

impl BoundarySolution {
    /// (β, β') at r; below the launch radius the leading small-r behaviour
    /// is continued.
    pub fn scaled(&self, r: f64) -> (C64, C64) {
        if r >= self.r0 {
            let s = self.traj.eval(r);
            return (s[0], s[1]);
        }
        let s = self.traj.end().1;
        let (b0, db0) = (s[0], s[1]);
        if self.ell == 0 {
            (b0 + db0 * self.r0 * (r / self.r0).ln(), db0 * self.r0 / r)
        } else {
            let p = 2 * self.ell as i32;
            let t = r / self.r0;
            (
                b0 + db0 * self.r0 / p as f64 * (t.powi(p) - 1.0),
                db0 * t.powi(p - 1),
            )
        }
    }

    pub fn beta(&self, r: f64) -> C64 {
        self.scaled(r).0
    }
}

fn launch_radius(v: &RadialPotential2D) -> f64 {
    LAUNCH_FRACTION * v.radius
}

fn solve_regular(
    ell: usize,
    v: &RadialPotential2D,
    z: C64,
    r0: f64,
    tol: f64,
) -> Result<RegularSolution> {
    let l = ell as f64;
    let c = (v.eval(r0) - z) / (4.0 * (l + 1.0));
    let y0 = [ONE + c * r0 * r0, 2.0 * c * r0];
    let traj = integrate(
        |r, y: &[C64; 2]| [y[1], -(2.0 * l + 1.0) / r * y[1] + (v.eval(r) - z) * y[0]],
        r0,
        v.radius,
        y0,
        &v.breakpoints,
        tol,
    )?;
    let end = traj.end().1;
    finite(end[0], "regular radial solution")?;
    finite(end[1], "regular radial solution")?;
    Ok(RegularSolution {
        ell,
        radius: v.radius,
        r0,
        c,
        traj,
    })
}

/// Solution regular at the origin (u ~ r^{|ℓ|}), launched at r₀ = 10⁻⁶R
/// from the two-term Frobenius expansion.
pub fn radial_regular_solution(
    ell: i64,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<RegularSolution> {
    settings.validate()?;
    let l = mode_order(ell)?;
    solve_regular(l, v, pt.z, launch_radius(v), settings.ode_tol)
}

/// Same, with an explicit launch radius.
pub fn radial_regular_solution_from(
    ell: i64,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    r0: f64,
    settings: &Settings,
) -> Result<RegularSolution> {
    settings.validate()?;
    if !(r0 > 0.0 && r0 < v.radius) {
        return Err(Error::Parameter(format!(
            "launch radius {r0} outside (0, R)"
        )));
    }
    solve_regular(mode_order(ell)?, v, pt.z, r0, settings.ode_tol)
}

/// Solution satisfying the boundary condition at R, integrated inward.
pub fn radial_boundary_solution(
    ell: i64,
    bc: Bc,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<BoundarySolution> {
    settings.validate()?;
    let ell = mode_order(ell)?;
    let l = ell as f64;
    let r_max = v.radius;
    let z = pt.z;
    let y0 = match bc {
        Bc::Dirichlet => [ZERO, ONE],
        Bc::Neumann => [ONE, C64::new(l / r_max, 0.0)],
    };
    let r0 = launch_radius(v);
    let traj = integrate(
        |r, y: &[C64; 2]| [y[1], -(1.0 - 2.0 * l) / r * y[1] + (v.eval(r) - z) * y[0]],
        r_max,
        r0,
        y0,
        &v.breakpoints,
        settings.ode_tol,
    )?;
    finite(traj.end().1[0], "boundary radial solution")?;
    Ok(BoundarySolution {
        ell,
        bc,
        radius: r_max,
        r0,
        traj,
    })
}

/// m_ℓ(z) = −u'(R)/u(R), the DtN eigenvalue of mode ℓ.
pub fn dtn_mode(
    ell: i64,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<C64> {
    radial_regular_solution(ell, v, pt, settings)?.dtn()
}

/// n_ℓ(z) = u(R)/u'(R), from the Riccati equation for η = r u'/u,
/// η' = (ℓ² − η²)/r + r(V − z), in a run separate from [`dtn_mode`].
pub fn ntd_mode(
    ell: i64,
    v: &RadialPotential2D,
    pt: &SpectralPoint,
    settings: &Settings,
) -> Result<C64> {
    settings.validate()?;
    let l = mode_order(ell)? as f64;
    let z = pt.z;
    let r0 = launch_radius(v);
    let c = (v.eval(r0) - z) / (4.0 * (l + 1.0));
    let eta0 = l + 2.0 * c * r0 * r0 / (ONE + c * r0 * r0);
    let traj = integrate(
        |r, e: &[C64; 1]| [(l * l - e[0] * e[0]) / r + r * (v.eval(r) - z)],
        r0,
        v.radius,
        [eta0],
        &v.breakpoints,
        settings.ode_tol,
    )?;
    let eta = finite(traj.end().1[0], "Riccati NtD")?;
    if eta.norm() < POLE_FLOOR * (l + 1.0) {
        return Err(Error::Pole {
            what: "u'(R)",
            magnitude: eta.norm(),
        });
    }
    Ok(v.radius / eta)
}
