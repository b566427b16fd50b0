//! Analytic invariants of the half-line and disk pipelines, sampled on
//! fixed point sets.

use std::f64::consts::PI;

use detlab_core::disk::{compute_modes, ModeData, RadialPotential2D};
use detlab_core::halfline::{
    jost_solution, m_function, regular_solution_dirichlet, wronskian, Bc, Potential1D,
    SpectralPoint,
};
use detlab_core::verify::{verify_jost_pais, verify_ratio_1d};
use detlab_core::{Settings, C64};

fn pt(z: C64) -> SpectralPoint {
    SpectralPoint::new(z).unwrap()
}

fn potentials() -> Vec<Potential1D> {
    vec![
        Potential1D::exponential(-2.0, 1.0, 30.0).unwrap(),
        Potential1D::square_well(1.0, 1.0, 30.0).unwrap(),
    ]
}

#[test]
fn dirichlet_m_function_is_herglotz() {
    let settings = Settings::default();
    for v in &potentials() {
        for re in [-4.0, -1.0, 0.5, 3.0] {
            for im in [0.05, 0.5, 2.0] {
                let m = m_function(v, &pt(C64::new(re, im)), Bc::Dirichlet, &settings).unwrap();
                assert!(m.im > 0.0, "{} at {re}+{im}i: {m}", v.label);
            }
        }
    }
}

#[test]
fn wronskian_is_constant_along_the_grid() {
    let settings = Settings::default();
    for v in &potentials() {
        for z in [C64::new(-1.0, 0.0), C64::new(-1.0, 1.0)] {
            let p = pt(z);
            let f = jost_solution(v, &p, &settings).unwrap();
            let phi = regular_solution_dirichlet(v, &p, &settings).unwrap();
            let w0 = wronskian(&f, &phi, f.grid.nodes[0]).unwrap();
            for &x in f.grid.nodes.iter().step_by(7) {
                let w = wronskian(&f, &phi, x).unwrap();
                assert!(
                    (w - w0).norm() <= 1e-8 * w0.norm(),
                    "{} z={z} x={x}: {w} vs {w0}",
                    v.label
                );
            }
        }
    }
}

/// m along a circle that crosses the negative axis twice. A branch slip
/// would show as an isolated jump, so second differences must stay small
/// next to first differences, and the loop must close.
#[test]
fn m_function_returns_after_a_loop_around_the_negative_axis() {
    let settings = Settings::default();
    let v = &potentials()[0];
    let (centre, radius, steps) = (C64::new(-2.0, 0.0), 1.0, 96);
    let values: Vec<C64> = (0..=steps)
        .map(|s| {
            let z = centre + C64::from_polar(radius, 2.0 * PI * s as f64 / steps as f64);
            m_function(v, &pt(z), Bc::Dirichlet, &settings).unwrap()
        })
        .collect();
    for w in values.windows(3) {
        let first = (w[1] - w[0]).norm().max((w[2] - w[1]).norm());
        let second = (w[2] - 2.0 * w[1] + w[0]).norm();
        assert!(second <= 0.2 * first, "{w:?}");
    }
    assert!((values[steps] - values[0]).norm() <= 1e-8 * values[0].norm());
}

fn refinement_levels() -> Vec<Settings> {
    let mut levels = vec![Settings::default()];
    for _ in 0..2 {
        let next = levels.last().unwrap().tightened();
        levels.push(next);
    }
    levels
}

#[test]
fn residuals_do_not_grow_under_refinement() {
    let levels = refinement_levels();
    for v in &potentials() {
        for z in [C64::new(-0.5, 0.0), C64::new(-1.0, 1.0)] {
            let p = pt(z);
            let series: Vec<Vec<f64>> = levels
                .iter()
                .map(|s| {
                    vec![
                        verify_jost_pais(v, &p, Bc::Dirichlet, s)
                            .unwrap()
                            .rel_residual,
                        verify_jost_pais(v, &p, Bc::Neumann, s)
                            .unwrap()
                            .rel_residual,
                        verify_ratio_1d(v, &p, s).unwrap().rel_residual,
                    ]
                })
                .collect();
            for w in series.windows(2) {
                for (coarse, fine) in w[0].iter().zip(&w[1]) {
                    assert!(
                        *fine <= (1.5 * coarse).max(1e-10),
                        "{} z={z}: {coarse:.3e} -> {fine:.3e}",
                        v.label
                    );
                }
            }
        }
    }
}

#[test]
fn radial_modes_are_symmetric_in_ell() {
    let v = RadialPotential2D::gaussian(-4.0, 1.0 / 8f64.sqrt(), 1.0).unwrap();
    let grid = v.grid(4, 25).unwrap();
    let settings = Settings::default();
    let p = pt(C64::new(-2.0, 0.0));
    let close = |a: C64, b: C64| (a - b).norm() <= 1e-12 * a.norm().max(1.0);
    for ell in [1, 2, 5, 11] {
        let plus = ModeData::compute(ell, &v, &p, &grid, &settings).unwrap();
        let minus = ModeData::compute(-ell, &v, &p, &grid, &settings).unwrap();
        let pairs = [
            (plus.m_ell, minus.m_ell),
            (plus.n_ell, minus.n_ell),
            (plus.d_ell, minus.d_ell),
            (plus.b_ell, minus.b_ell),
            (plus.tau_ell, minus.tau_ell),
            (plus.det2_d_ell, minus.det2_d_ell),
            (plus.det2_n_ell, minus.det2_n_ell),
        ];
        assert!(pairs.iter().all(|(a, b)| close(*a, *b)), "ell={ell}");
    }
}

#[test]
fn boundary_ratio_tracks_the_dtn_ratio_mode_by_mode() {
    let v = RadialPotential2D::gaussian(-4.0, 1.0 / 8f64.sqrt(), 1.0).unwrap();
    let grid = v.grid(8, 25).unwrap();
    let modes = compute_modes(
        &v,
        &pt(C64::new(-1.0, 1.0)),
        12,
        &grid,
        &Settings::default(),
    )
    .unwrap();
    let mut prev = f64::INFINITY;
    for m in &modes {
        assert!((m.d_ell - (1.0 - m.b_ell)).norm() <= 1e-6, "ell={}", m.ell);
        if m.ell >= 3 {
            assert!(
                m.abs_d_minus_1() < prev,
                "|d-1| not decreasing at ell={}",
                m.ell
            );
        }
        prev = m.abs_d_minus_1();
    }
}
