//! The disk Birman–Schwinger operator assembled as one matrix on a polar
//! tensor grid, against the product of its per-mode det₂.

use std::f64::consts::PI;

use detlab_core::disk::{ModePipeline, RadialPotential2D};
use detlab_core::halfline::{Bc, SpectralPoint};
use detlab_core::numerics::{det2_from_matrix, ComplexMatrix};
use detlab_core::{Settings, C64};

/// Σ_{|ℓ| ≤ L} K_ℓ(r, r') e^{iℓ(θ − θ')}/(2π) on r-nodes × M equispaced angles.
/// With M > 2L the angular rule resolves every retained mode exactly.
fn full_matrix(blocks: &[(i64, &ComplexMatrix)], n_r: usize, n_theta: usize) -> ComplexMatrix {
    let theta = |a: usize| 2.0 * PI * a as f64 / n_theta as f64;
    ComplexMatrix::from_fn(n_r * n_theta, n_r * n_theta, |p, q| {
        let (i, a) = (p / n_theta, p % n_theta);
        let (j, b) = (q / n_theta, q % n_theta);
        blocks
            .iter()
            .map(|(ell, k)| k.row(i)[j] * C64::from_polar(1.0, *ell as f64 * (theta(a) - theta(b))))
            .sum::<C64>()
            / n_theta as f64
    })
}

#[test]
fn det2_over_the_disk_factorizes_over_modes() {
    let v = RadialPotential2D::gaussian(-4.0, 1.0 / 8f64.sqrt(), 1.0).unwrap();
    let grid = v.grid(2, 10).unwrap();
    let settings = Settings::default();
    let l_max = 3;
    let n_theta = 2 * l_max as usize + 2;
    for z in [C64::new(-2.0, 0.0), C64::new(-1.0, 1.0)] {
        let pt = SpectralPoint::new(z).unwrap();
        let pipes: Vec<ModePipeline> = (-l_max..=l_max)
            .map(|ell| ModePipeline::new(ell, &v, &pt, &grid, &settings).unwrap())
            .collect();
        for bc in [Bc::Dirichlet, Bc::Neumann] {
            let blocks: Vec<(i64, &ComplexMatrix)> = pipes
                .iter()
                .zip(-l_max..=l_max)
                .map(|(p, l)| (l, p.bs_matrix(bc)))
                .collect();
            let product: C64 = blocks
                .iter()
                .map(|(_, k)| det2_from_matrix(k).unwrap())
                .product();
            let full = det2_from_matrix(&full_matrix(&blocks, grid.len(), n_theta)).unwrap();
            assert!(
                (full - product).norm() <= 1e-12 * product.norm(),
                "{bc:?} z={z}: {full} vs {product}"
            );
        }
    }
}
