//! Finite-difference eigenvalue oracles, independent of every
//! determinant pipeline: symmetric tridiagonal matrices solved by Sturm
//! bisection, then Richardson-extrapolated in h.

use crate::disk::RadialPotential2D;
use crate::error::{Error, Result};
use crate::halfline::{Bc, Potential1D};

/// Number of eigenvalues below x of the symmetric tridiagonal matrix.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (diag[i].abs() + x.abs()).max(1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in (lo, hi), ascending, to absolute accuracy 1e-13.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let below_lo = sturm_count(diag, off, lo);
    let below_hi = sturm_count(diag, off, hi);
    (below_lo..below_hi)
        .map(|idx| {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-13 * (1.0 + a.abs().max(b.abs())) {
                let m = 0.5 * (a + b);
                if sturm_count(diag, off, m) > idx {
                    b = m;
                } else {
                    a = m;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Richardson combination of eigenvalue lists on grids h and h/2,
/// matched from the bottom of the spectrum.
fn richardson(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}

fn within(values: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    values.into_iter().filter(|&x| x > lo && x < hi).collect()
}

/// Cell-centred second differences for −u'' + V u on (0, L) with the given
/// condition at 0 and u(L) = 0.
pub fn halfline_fd_matrix(v: &Potential1D, bc: Bc, length: f64, h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = (length / h).round() as usize;
    let ih2 = 1.0 / (h * h);
    let mut diag: Vec<f64> = (0..n)
        .map(|j| 2.0 * ih2 + v.eval((j as f64 + 0.5) * h).re)
        .collect();
    diag[0] += match bc {
        Bc::Neumann => -ih2,
        Bc::Dirichlet => ih2,
    };
    diag[n - 1] += ih2;
    (diag, vec![-ih2; n - 1])
}

/// Eigenvalues in (lo, hi) of the half-line operator on (0, 20), h = 10⁻³,
/// extrapolated with the h/2 grid.
pub fn halfline_fd_eigenvalues(v: &Potential1D, bc: Bc, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !v.real_valued {
        return Err(Error::Parameter(
            "eigenvalue oracle needs a real potential".into(),
        ));
    }
    const LENGTH: f64 = 20.0;
    const H: f64 = 1e-3;
    let floor = (0..20_000)
        .map(|j| v.eval(j as f64 * LENGTH / 20_000.0).re)
        .fold(0.0, f64::min)
        - 1.0;
    let solve = |h: f64| {
        let (d, o) = halfline_fd_matrix(v, bc, LENGTH, h);
        tridiagonal_eigenvalues(&d, &o, floor, hi)
    };
    Ok(within(richardson(&solve(H), &solve(0.5 * H)), lo, hi))
}

/// Flux-form cell-centred discretization of −(1/r)(r u')' + (ℓ²/r² + V) u on
/// (0, R), symmetrized with √r.
pub fn radial_fd_matrix(v: &RadialPotential2D, ell: i64, bc: Bc, h: f64) -> (Vec<f64>, Vec<f64>) {
    let n = (v.radius / h).round() as usize;
    let l2 = (ell * ell) as f64;
    let ih2 = 1.0 / (h * h);
    let rc = |j: usize| (j as f64 + 0.5) * h;
    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        let r = rc(j);
        let left = j as f64 * h;
        let right = (j + 1) as f64 * h;
        let mut t = (left + right) * ih2 + r * (l2 / (r * r) + v.eval(r).re);
        if j == n - 1 {
            t += match bc {
                Bc::Neumann => -right * ih2,
                Bc::Dirichlet => right * ih2,
            };
        }
        diag.push(t / r);
    }
    let off = (0..n - 1)
        .map(|j| -((j + 1) as f64 * h) * ih2 / (rc(j) * rc(j + 1)).sqrt())
        .collect();
    (diag, off)
}

/// Eigenvalues in (lo, hi) of mode ℓ on the disk, h = R/4000, extrapolated
/// with the h/2 grid.
pub fn radial_fd_eigenvalues(
    v: &RadialPotential2D,
    ell: i64,
    bc: Bc,
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>> {
    if !v.real_valued {
        return Err(Error::Parameter(
            "eigenvalue oracle needs a real potential".into(),
        ));
    }
    let h = v.radius / 4000.0;
    let floor = (0..4000)
        .map(|j| v.eval((j as f64 + 0.5) * h).re)
        .fold(0.0, f64::min)
        - 1.0;
    let solve = |h: f64| {
        let (d, o) = radial_fd_matrix(v, ell, bc, h);
        tridiagonal_eigenvalues(&d, &o, floor, hi)
    };
    Ok(within(richardson(&solve(h), &solve(0.5 * h)), lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Roots of q tan q = κ (Neumann) or q cot q = −κ (Dirichlet) for the
    /// well −depth on (0, 1), q = √(depth + z), κ = √(−z).
    fn well_roots(depth: f64, bc: Bc) -> Vec<f64> {
        let f = |z: f64| {
            let q = (depth + z).sqrt();
            let kappa = (-z).sqrt();
            match bc {
                Bc::Neumann => q * q.sin() - kappa * q.cos(),
                Bc::Dirichlet => q * q.cos() + kappa * q.sin(),
            }
        };
        let n = 4000;
        let mut roots = Vec::new();
        for s in 0..n {
            let (mut a, mut b) = (
                -depth + depth * s as f64 / n as f64,
                -depth + depth * (s + 1) as f64 / n as f64,
            );
            if f(a) * f(b) < 0.0 {
                for _ in 0..100 {
                    let m = 0.5 * (a + b);
                    if f(a) * f(m) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
        }
        roots
    }

    #[test]
    fn sturm_count_on_known_matrix() {
        // tridiag(−1, 2, −1) of size n has eigenvalues 2 − 2cos(jπ/(n+1))
        let n = 50;
        let d = vec![2.0; n];
        let o = vec![-1.0; n - 1];
        let ev = tridiagonal_eigenvalues(&d, &o, -1.0, 5.0);
        assert_eq!(ev.len(), n);
        for (j, e) in ev.iter().enumerate() {
            let want = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((e - want).abs() < 1e-12);
        }
    }

    #[test]
    fn square_well_oracle_matches_transcendental_roots() {
        let v = Potential1D::square_well(4.0, 1.0, 30.0).unwrap();
        for bc in [Bc::Neumann, Bc::Dirichlet] {
            let fd = halfline_fd_eigenvalues(&v, bc, -4.0, -0.01).unwrap();
            let exact = well_roots(4.0, bc);
            assert_eq!(fd.len(), exact.len(), "{bc:?}: {fd:?} vs {exact:?}");
            for (a, b) in fd.iter().zip(&exact) {
                assert!((a - b).abs() < 1e-7, "{bc:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn radial_oracle_matches_free_disk() {
        // −Δ on the unit disk with V = −c: Dirichlet ℓ = 0 eigenvalue j₀₁² − c
        let c = 10.0;
        let v = RadialPotential2D::custom(
            "const",
            move |_| crate::numerics::C64::new(-c, 0.0),
            1.0,
            vec![],
            2.0,
            true,
        )
        .unwrap();
        let ev = radial_fd_eigenvalues(&v, 0, Bc::Dirichlet, -10.0, 0.0).unwrap();
        let j01 = 2.404825557695773f64;
        assert_eq!(ev.len(), 1);
        assert!((ev[0] - (j01 * j01 - c)).abs() < 1e-7, "{ev:?}");
        // Neumann ℓ = 1: first zero of J₁'
        let ev = radial_fd_eigenvalues(&v, 1, Bc::Neumann, -10.0, 0.0).unwrap();
        let j11p = 1.841183781340659f64;
        assert!((ev[0] - (j11p * j11p - c)).abs() < 1e-7, "{ev:?}");
    }
}
