//! The nine acceptance criteria, run in order in one test so that the
//! reported timings are not distorted by other tests sharing the machine.

use std::time::{Duration, Instant};

use detlab_core::disk::{
    compute_modes, DiskAssembly, ModeData, RadialPotential2D, ReciprocalAssembly,
};
use detlab_core::halfline::{
    dirichlet_boundary_scalar_1d, m_function, Bc, Potential1D, SpectralPoint,
};
use detlab_core::numerics::quadrature::{gauss_legendre, QuadratureGrid};
use detlab_core::numerics::{commuted_det_identity_check, det2_from_matrix, ComplexMatrix};
use detlab_core::verify::{
    eigenvalue_scan, mode_identity_reports, oracle, verify_jost_pais, verify_ratio_1d, ScanProblem,
};
use detlab_core::{Discretization, Settings, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn pt(z: C64) -> SpectralPoint {
    SpectralPoint::new(z).unwrap()
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// A residual counts as reduced when it at least halves or reaches the floor.
fn reduced(coarse: f64, fine: f64) -> bool {
    fine <= (coarse / 2.0).max(1e-10)
}

fn halfline_potentials() -> Vec<Potential1D> {
    vec![
        Potential1D::exponential(-2.0, 1.0, 30.0).unwrap(),
        Potential1D::square_well(1.0, 1.0, 30.0).unwrap(),
    ]
}

fn disk_potential() -> RadialPotential2D {
    RadialPotential2D::gaussian(-4.0, 1.0 / 8f64.sqrt(), 1.0).unwrap()
}

fn disk_grid(v: &RadialPotential2D, panels: usize) -> QuadratureGrid {
    v.grid(panels, 25).unwrap()
}

fn criterion_1() -> Outcome {
    let settings = Settings::default();
    let v = Potential1D::zero(30.0).unwrap();
    let mut worst: f64 = 0.0;
    // Jost-Pais reports carry the Nyström determinants and the ratio report
    // carries the Neumann boundary scalar.
    let zs = [
        re(-0.5),
        re(-1.0),
        re(-5.0),
        C64::new(-1.0, 1.0),
        C64::new(2.0, 1.0),
    ];
    for &z in &zs {
        let p = pt(z);
        for bc in [Bc::Dirichlet, Bc::Neumann] {
            let r = verify_jost_pais(&v, &p, bc, &settings).unwrap();
            worst = r
                .sides
                .iter()
                .fold(worst, |w, s| w.max((s.value - 1.0).norm()));
        }
        let r = verify_ratio_1d(&v, &p, &settings).unwrap();
        worst = r
            .sides
            .iter()
            .fold(worst, |w, s| w.max((s.value - 1.0).norm()));
        worst = worst.max(
            (dirichlet_boundary_scalar_1d(&v, &p, &settings)
                .unwrap()
                .value
                - 1.0)
                .norm(),
        );
    }
    let mut m_err: f64 = 0.0;
    let mut rng = StdRng::seed_from_u64(1);
    let mut n_points = 0;
    while n_points < 10 {
        let z = C64::new(rng.gen_range(-6.0..3.0), rng.gen_range(-3.0..3.0));
        if SpectralPoint::distance_to_ray(z) < 0.5 {
            continue;
        }
        n_points += 1;
        let p = pt(z);
        let k = p.k();
        let md = m_function(&v, &p, Bc::Dirichlet, &settings).unwrap();
        let mn = m_function(&v, &p, Bc::Neumann, &settings).unwrap();
        m_err = m_err
            .max((md - C64::i() * k).norm() / k.norm())
            .max((mn - C64::i() / k).norm() * k.norm());
    }
    let free = RadialPotential2D::zero(1.0).unwrap();
    let grid = disk_grid(&free, 4);
    let modes = compute_modes(&free, &pt(re(-2.0)), 10, &grid, &settings).unwrap();
    let mut disk_err: f64 = 0.0;
    for m in &modes {
        for one in [
            m.d_ell,
            m.det2_d_ell,
            m.det2_n_ell,
            m.boundary_factor(),
            m.dtn_factor(),
        ] {
            disk_err = disk_err.max((one - 1.0).norm());
        }
        for zero in [
            m.b_ell,
            m.c_ell,
            m.tau_ell,
            m.tau_prime_ell,
            m.dtn_difference,
        ] {
            disk_err = disk_err.max(zero.norm());
        }
    }
    let a = DiskAssembly::from_modes(modes);
    for q in [a.q1.total, a.q2.total, a.q3.total] {
        disk_err = disk_err.max((q - 1.0).norm());
    }
    let ok = worst <= 1e-10 && m_err <= 1e-10 && disk_err <= 1e-10;
    outcome(ok, format!("half-line max |x-1| {worst:.2e}, free m-functions {m_err:.2e} at 10 points, disk {disk_err:.2e}"))
}

fn jost_pais_residuals(settings: &Settings) -> Vec<f64> {
    let mut out = Vec::new();
    for v in &halfline_potentials() {
        for z in [re(-0.5), re(-1.0), re(-2.0), re(-5.0), C64::new(-1.0, 1.0)] {
            for bc in [Bc::Dirichlet, Bc::Neumann] {
                let r = verify_jost_pais(v, &pt(z), bc, settings).unwrap();
                assert_eq!(r.sides.len(), 4);
                out.push(r.rel_residual);
            }
        }
    }
    out
}

fn criterion_2() -> (Outcome, Vec<f64>) {
    let settings = Settings::default();
    let res = jost_pais_residuals(&settings);
    let max = res.iter().copied().fold(0.0, f64::max);
    (
        outcome(
            max <= 1e-6,
            format!("{} reports, max relative residual {max:.2e}", res.len()),
        ),
        res,
    )
}

fn criterion_3() -> Outcome {
    let settings = Settings::default();
    let mut zs: Vec<C64> = (0..20).map(|i| re(-5.0 + 4.5 * i as f64 / 19.0)).collect();
    zs.push(C64::new(-1.0, 1.0));
    let mut max: f64 = 0.0;
    let mut n = 0;
    for v in &halfline_potentials() {
        for &z in &zs {
            let r = verify_ratio_1d(v, &pt(z), &settings).unwrap();
            assert_eq!(r.sides.len(), 4);
            max = max.max(r.rel_residual);
            n += 1;
        }
    }
    outcome(
        max <= 1e-6,
        format!("{n} reports, max relative residual {max:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let settings = Settings::default();
    let v = disk_potential();
    let grid = disk_grid(&v, 8);
    let p = pt(re(-2.0));
    let disc = Discretization::default();
    let mut reciprocity: f64 = 0.0;
    let mut trace_forms: f64 = 0.0;
    for ell in -20..=20 {
        let m = ModeData::compute(ell, &v, &p, &grid, &settings).unwrap();
        let reports = mode_identity_reports(&m, p.z, &disc);
        reciprocity = reciprocity.max(reports[0].abs_residual);
        trace_forms = trace_forms
            .max(reports[1].abs_residual)
            .max(reports[2].abs_residual);
    }
    let ok = reciprocity <= 1e-10 && trace_forms <= 1e-6;
    outcome(
        ok,
        format!("41 modes, |n m + 1| {reciprocity:.2e}, trace forms {trace_forms:.2e}"),
    )
}

struct DiskRun {
    q12: f64,
    q23: f64,
    tail: f64,
    reciprocity: f64,
}

fn disk_run(z: f64, panels: usize, settings: &Settings) -> DiskRun {
    let v = disk_potential();
    let grid = disk_grid(&v, panels);
    let modes = compute_modes(&v, &pt(re(z)), 40, &grid, settings).unwrap();
    let a = DiskAssembly::from_modes(modes.clone());
    let r = ReciprocalAssembly::from_modes(modes);
    let (q1, q2, q3) = (a.q1.partial, a.q2.partial, a.q3.partial);
    DiskRun {
        q12: (q1 - q2).norm() / q1.norm(),
        q23: (q2 - q3).norm() / q2.norm(),
        tail: a.relative_tail(),
        reciprocity: (r.lhs.partial * q1 - 1.0).norm(),
    }
}

const DISK_POINTS: [f64; 3] = [-2.0, -1.0, -4.0];

fn criterion_5() -> (Outcome, Vec<DiskRun>) {
    let settings = Settings::default();
    let runs: Vec<DiskRun> = DISK_POINTS
        .iter()
        .map(|&z| disk_run(z, 8, &settings))
        .collect();
    let ok = runs
        .iter()
        .all(|r| r.q12 <= 1e-4 && r.q23 <= 1e-4 && r.tail <= 1e-6);
    let detail = DISK_POINTS
        .iter()
        .zip(&runs)
        .map(|(z, r)| {
            format!(
                "z={z}: |Q1-Q2| {:.2e} |Q2-Q3| {:.2e} tail {:.2e}",
                r.q12, r.q23, r.tail
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    (outcome(ok, detail), runs)
}

fn criterion_6(runs: &[DiskRun]) -> Outcome {
    let max = runs.iter().map(|r| r.reciprocity).fold(0.0, f64::max);
    outcome(
        max <= 1e-8,
        format!("max |lhs * Q1 - 1| {max:.2e} over z in {DISK_POINTS:?}"),
    )
}

fn criterion_7() -> Outcome {
    let v = Potential1D::square_well(4.0, 1.0, 20.0).unwrap();
    let scan = eigenvalue_scan(
        &ScanProblem::Halfline {
            v: &v,
            bc: Bc::Neumann,
        },
        (-4.0, -1e-3),
        80,
        &Settings::default(),
    )
    .unwrap();
    let expected = oracle::halfline_fd_eigenvalues(&v, Bc::Neumann, -4.0, 0.0).unwrap();
    let mismatch = scan.max_mismatch();
    let ok = scan.roots.len() == expected.len() && mismatch <= 1e-6 && !scan.ill_conditioned;
    outcome(
        ok,
        format!(
            "roots {:?}, oracle {:?}, max mismatch {mismatch:.2e}",
            scan.roots, expected
        ),
    )
}

fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> ComplexMatrix {
    let scale = 1.0 / ((rows * cols) as f64).sqrt();
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
    })
}

fn criterion_8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let mut commuted: f64 = 0.0;
    let mut all_pass = true;
    for _ in 0..200 {
        let n = rng.gen_range(1..=12);
        let m = rng.gen_range(1..=12);
        let a = random_matrix(&mut rng, n, m);
        let b = random_matrix(&mut rng, m, n);
        let r = commuted_det_identity_check(&a, &b).unwrap();
        commuted = commuted.max(r.abs_residual);
        all_pass &= r.converged;
    }
    let mut diag: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=20);
        let d: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen_range(-0.9..2.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let exact: C64 = d.iter().map(|x| (1.0 + x) * (-x).exp()).product();
        let got = det2_from_matrix(&ComplexMatrix::diagonal(&d)).unwrap();
        diag = diag.max((got - exact).norm() / exact.norm());
    }
    let mut quad: f64 = 0.0;
    for n in 1..=40 {
        let (x, w) = gauss_legendre(n);
        for deg in 0..2 * n {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / (deg as f64 + 1.0)
            };
            quad = quad.max((got - exact).abs());
        }
    }
    let ok = all_pass && commuted <= 1e-12 && diag <= 1e-13 && quad <= 1e-13;
    outcome(ok, format!("commuted det {commuted:.2e} (200 pairs), det2 diagonal {diag:.2e}, Gauss-Legendre {quad:.2e}"))
}

fn criterion_9(jost: &[f64], disk: &[DiskRun]) -> Outcome {
    let tight = Settings::default().tightened();
    let jost_fine = jost_pais_residuals(&tight);
    let mut failures = Vec::new();
    for (i, (c, f)) in jost.iter().zip(&jost_fine).enumerate() {
        if !reduced(*c, *f) {
            failures.push(format!("jost-pais #{i}: {c:.2e} -> {f:.2e}"));
        }
    }
    let jost_max = jost_fine.iter().copied().fold(0.0, f64::max);
    let mut disk_lines = Vec::new();
    for (&z, coarse) in DISK_POINTS.iter().zip(disk) {
        let fine = disk_run(z, 16, &tight);
        for (name, c, f) in [
            ("Q1-Q2", coarse.q12, fine.q12),
            ("Q2-Q3", coarse.q23, fine.q23),
        ] {
            if !reduced(c, f) {
                failures.push(format!("z={z} {name}: {c:.2e} -> {f:.2e}"));
            }
            disk_lines.push(format!("z={z} {name} {c:.2e}->{f:.2e}"));
        }
    }
    let detail = format!(
        "jost-pais max after tightening {jost_max:.2e}; {}",
        disk_lines.join(", ")
    );
    if failures.is_empty() {
        outcome(true, detail)
    } else {
        outcome(
            false,
            format!("{detail}; not reduced: {}", failures.join(", ")),
        )
    }
}

fn record(
    results: &mut Vec<bool>,
    n: usize,
    budget: Option<Duration>,
    elapsed: Duration,
    o: Outcome,
) {
    let in_time = budget.is_none_or(|b| elapsed <= b);
    let ok = o.ok && in_time;
    let budget_text = budget.map_or(String::new(), |b| {
        format!(" / budget {:.0} s", b.as_secs_f64())
    });
    println!(
        "{} criterion {n}: {} [{:.2} s{budget_text}]",
        if ok { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64()
    );
    results.push(ok);
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

#[test]
fn acceptance() {
    let mut results = Vec::new();
    let (o, t) = timed(criterion_1);
    record(&mut results, 1, Some(Duration::from_secs(1)), t, o);
    let ((o, jost), t) = timed(criterion_2);
    record(&mut results, 2, Some(Duration::from_secs(10)), t, o);
    let (o, t) = timed(criterion_3);
    record(&mut results, 3, Some(Duration::from_secs(30)), t, o);
    let (o, t) = timed(criterion_4);
    record(&mut results, 4, Some(Duration::from_secs(30)), t, o);
    let ((o, disk), t5) = timed(criterion_5);
    record(&mut results, 5, Some(Duration::from_secs(180)), t5, o);
    let (o, t) = timed(|| criterion_6(&disk));
    record(&mut results, 6, None, t + t5, o);
    let (o, t) = timed(criterion_7);
    record(&mut results, 7, Some(Duration::from_secs(20)), t, o);
    let (o, t) = timed(criterion_8);
    record(&mut results, 8, None, t, o);
    let (o, t) = timed(|| criterion_9(&jost, &disk));
    record(&mut results, 9, None, t, o);
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
