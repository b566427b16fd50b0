//! Nyström discretization of semiseparable Green kernels
//! `G(x, y) = e^{g(x<) − g(x>)} α(x<) β(x>) / c`.
//!
//! Plain Nyström loses accuracy on the diagonal kink of such kernels. Here
//! the part of each integral that lies inside the node's own panel is split
//! at the node and integrated with a sub-rule against the Lagrange
//! interpolant of the density, so operator application keeps the spectral
//! accuracy of the underlying Gauss rule. The gauge `g` keeps growing and
//! decaying factors from overflowing.

use crate::error::Result;
use crate::numerics::linalg::det_lu;
use crate::numerics::quadrature::QuadratureGrid;
use crate::numerics::{ComplexMatrix, C64, ZERO};

type RealFn<'a> = Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>;
type ComplexFn<'a> = Box<dyn Fn(f64) -> C64 + Send + Sync + 'a>;

pub struct SemiseparableKernel<'a> {
    alpha: ComplexFn<'a>,
    beta: ComplexFn<'a>,
    gauge: RealFn<'a>,
    norm: C64,
}

impl<'a> SemiseparableKernel<'a> {
    pub fn new(
        alpha: impl Fn(f64) -> C64 + Send + Sync + 'a,
        beta: impl Fn(f64) -> C64 + Send + Sync + 'a,
        gauge: impl Fn(f64) -> f64 + Send + Sync + 'a,
        norm: C64,
    ) -> Self {
        Self {
            alpha: Box::new(alpha),
            beta: Box::new(beta),
            gauge: Box::new(gauge),
            norm,
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> C64 {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        ((self.gauge)(lo) - (self.gauge)(hi)).exp() * (self.alpha)(lo) * (self.beta)(hi) / self.norm
    }

    /// Kernel of the pointwise square G(x, y)².
    pub fn squared(&self) -> SemiseparableKernel<'_> {
        SemiseparableKernel::new(
            |x| {
                let a = (self.alpha)(x);
                a * a
            },
            |x| {
                let b = (self.beta)(x);
                b * b
            },
            |x| 2.0 * (self.gauge)(x),
            self.norm * self.norm,
        )
    }

    /// Kernel of |G(x, y)|².
    pub fn abs_squared(&self) -> SemiseparableKernel<'_> {
        SemiseparableKernel::new(
            |x| C64::new((self.alpha)(x).norm_sqr(), 0.0),
            |x| C64::new((self.beta)(x).norm_sqr(), 0.0),
            |x| 2.0 * (self.gauge)(x),
            C64::new(self.norm.norm_sqr(), 0.0),
        )
    }

    /// Matrix A with `(A h)_i ≈ ∫ G(x_i, y) h(y) dμ(y)` for h smooth on
    /// each panel.
    pub fn operator_matrix(&self, grid: &QuadratureGrid) -> ComplexMatrix {
        let n = grid.len();
        let k = grid.nodes_per_panel;
        let rule = grid.reference_rule();
        let alpha: Vec<C64> = grid.nodes.iter().map(|&x| (self.alpha)(x)).collect();
        let beta: Vec<C64> = grid.nodes.iter().map(|&x| (self.beta)(x)).collect();
        let gauge: Vec<f64> = grid.nodes.iter().map(|&x| (self.gauge)(x)).collect();
        let inv = 1.0 / self.norm;
        let mut a = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            let pi = grid.panel_of(i);
            for j in 0..n {
                if grid.panel_of(j) == pi {
                    continue;
                }
                let v = if j < i {
                    (gauge[j] - gauge[i]).exp() * alpha[j] * beta[i]
                } else {
                    (gauge[i] - gauge[j]).exp() * alpha[i] * beta[j]
                };
                a[(i, j)] = v * inv * grid.weights[j];
            }
        }
        let mut basis = vec![0.0; k];
        for (p, &(l, r)) in grid.panels.iter().enumerate() {
            let range = grid.panel_range(p);
            let half = 0.5 * (r - l);
            let mid = 0.5 * (r + l);
            for i in range.clone() {
                let xi = grid.nodes[i];
                let mut row = vec![ZERO; k];
                // left piece [l, x_i]: x_i is the larger argument
                let hl = 0.5 * (xi - l);
                for q in 0..k {
                    let y = l + hl * (rule.nodes[q] + 1.0);
                    let f = ((self.gauge)(y) - gauge[i]).exp()
                        * (self.alpha)(y)
                        * beta[i]
                        * (hl * rule.weights[q] * grid.density(y));
                    rule.lagrange((y - mid) / half, &mut basis);
                    for j in 0..k {
                        row[j] += f * basis[j];
                    }
                }
                // β may be singular at a panel edge sitting on the origin, so
                // there the right piece is cut geometrically
                let mut cuts = vec![xi];
                if l == 0.0 {
                    while cuts[cuts.len() - 1] * 4.0 < r {
                        let c = cuts[cuts.len() - 1] * 4.0;
                        cuts.push(c);
                    }
                }
                cuts.push(r);
                for seg in cuts.windows(2) {
                    let hr = 0.5 * (seg[1] - seg[0]);
                    for q in 0..k {
                        let y = seg[0] + hr * (rule.nodes[q] + 1.0);
                        let f = (gauge[i] - (self.gauge)(y)).exp()
                            * alpha[i]
                            * (self.beta)(y)
                            * (hr * rule.weights[q] * grid.density(y));
                        rule.lagrange((y - mid) / half, &mut basis);
                        for j in 0..k {
                            row[j] += f * basis[j];
                        }
                    }
                }
                for (jj, j) in range.clone().enumerate() {
                    a[(i, j)] = row[jj] * inv;
                }
            }
        }
        a
    }

    /// Values G(x_i, x_i) on the grid.
    pub fn diagonal(&self, grid: &QuadratureGrid) -> Vec<C64> {
        grid.nodes.iter().map(|&x| self.eval(x, x)).collect()
    }
}

/// Birman–Schwinger discretization of u G v on a grid, with the exact
/// traces needed for the determinant corrections.
#[derive(Debug, Clone)]
pub struct BsDiscretization {
    /// Operator matrix of G (not weight-symmetrized).
    pub green: ComplexMatrix,
    /// diag(u) · green · diag(v).
    pub kernel: ComplexMatrix,
    /// Weight-symmetrized kernel D^{1/2} K D^{-1/2}.
    pub symmetric: ComplexMatrix,
    /// ∫ V(x) G(x, x) dμ.
    pub trace: C64,
    /// ∫∫ V(x) G(x, y)² V(y) dμ dμ.
    pub trace_square: C64,
}

impl BsDiscretization {
    pub fn new(
        kernel: &SemiseparableKernel<'_>,
        grid: &QuadratureGrid,
        u: &[C64],
        v: &[C64],
    ) -> Self {
        let green = kernel.operator_matrix(grid);
        let k = green.scale_rows_cols(u, v);
        let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
        let symmetric =
            ComplexMatrix::from_fn(k.rows(), k.cols(), |i, j| k[(i, j)] * sw[i] / sw[j]);
        let pot: Vec<C64> = u.iter().zip(v).map(|(a, b)| a * b).collect();
        let diag = kernel.diagonal(grid);
        let trace = (0..grid.len())
            .map(|i| grid.weights[i] * pot[i] * diag[i])
            .sum();
        let sq = kernel.squared().operator_matrix(grid);
        let sq_v = sq.mul_vec(&pot);
        let trace_square = (0..grid.len())
            .map(|i| grid.weights[i] * pot[i] * sq_v[i])
            .sum();
        Self {
            green,
            kernel: k,
            symmetric,
            trace,
            trace_square,
        }
    }

    /// det(I + K), with the linear and quadratic trace terms of log det
    /// replaced by their exact values.
    pub fn det(&self) -> Result<C64> {
        let raw = det_lu(&self.kernel.plus_identity())?;
        let correction = (self.trace - self.kernel.trace())
            - 0.5 * (self.trace_square - self.kernel.trace_of_square());
        Ok(raw * correction.exp())
    }

    /// det₂(I + K) = det(I + K)·exp(−tr K).
    pub fn det2(&self) -> Result<C64> {
        Ok(self.det()? * (-self.trace).exp())
    }
}

/// Panel edges on (a, b): `n_panels` panels equidistributing `density`
/// (blended with 5% of its mean), split at `breakpoints`, and no panel
/// wider than `max_width`.
pub fn graded_edges(
    a: f64,
    b: f64,
    n_panels: usize,
    density: impl Fn(f64) -> f64,
    breakpoints: &[f64],
    max_width: f64,
) -> Vec<f64> {
    const SAMPLES: usize = 4096;
    let h = (b - a) / SAMPLES as f64;
    let vals: Vec<f64> = (0..=SAMPLES)
        .map(|s| {
            let d = density(a + h * s as f64);
            if d.is_finite() {
                d.max(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let floor = if mean > 0.0 { 0.05 * mean } else { 1.0 };
    let mut cum = vec![0.0; SAMPLES + 1];
    for s in 1..=SAMPLES {
        cum[s] = cum[s - 1] + 0.5 * h * (vals[s - 1] + vals[s] + 2.0 * floor);
    }
    let total = cum[SAMPLES];
    let mut edges = vec![a];
    let mut s = 0;
    for p in 1..n_panels {
        let target = total * p as f64 / n_panels as f64;
        while cum[s + 1] < target {
            s += 1;
        }
        let frac = (target - cum[s]) / (cum[s + 1] - cum[s]);
        edges.push(a + h * (s as f64 + frac));
    }
    edges.push(b);
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.sort_by(f64::total_cmp);
    let min_gap = 1e-9 * (b - a);
    let mut merged: Vec<f64> = Vec::with_capacity(edges.len());
    for e in edges {
        match merged.last() {
            Some(&last) if e - last < min_gap => {
                if breakpoints.contains(&e) || e == b {
                    *merged.last_mut().unwrap() = e;
                }
            }
            _ => merged.push(e),
        }
    }
    if merged[0] != a {
        merged.insert(0, a);
    }
    let mut out = vec![merged[0]];
    for w in merged.windows(2) {
        let pieces = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for q in 1..=pieces {
            out.push(if q == pieces {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * q as f64 / pieces as f64
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{gauss_legendre_panels, WeightKind};

    fn exp_kernel() -> SemiseparableKernel<'static> {
        // G(x, y) = e^{-|x - y|}/2 written as e^{x<} e^{-x>}/2
        SemiseparableKernel::new(
            |_| C64::new(1.0, 0.0),
            |_| C64::new(1.0, 0.0),
            |x| x,
            C64::new(2.0, 0.0),
        )
    }

    #[test]
    fn product_integration_is_spectrally_accurate() {
        let g = gauss_legendre_panels(0.0, 2.0, 3, 12, WeightKind::Lebesgue).unwrap();
        let a = exp_kernel().operator_matrix(&g);
        let h: Vec<C64> = g.nodes.iter().map(|x| C64::new(x * x, 0.0)).collect();
        let got = a.mul_vec(&h);
        for (i, &x) in g.nodes.iter().enumerate() {
            // ∫_0^2 e^{-|x-y|} y² dy / 2, closed form
            let left = x * x - 2.0 * x + 2.0 - 2.0 * (-x).exp();
            let right = (x * x + 2.0 * x + 2.0) - (x - 2.0).exp() * 10.0;
            let want = 0.5 * (left + right);
            assert!(
                (got[i].re - want).abs() < 1e-13,
                "x = {x}: {} vs {want}",
                got[i].re
            );
        }
    }

    #[test]
    fn radial_density_enters_the_integral() {
        let g = gauss_legendre_panels(0.0, 1.0, 2, 10, WeightKind::Radial).unwrap();
        let k = SemiseparableKernel::new(
            |_| C64::new(1.0, 0.0),
            |_| C64::new(1.0, 0.0),
            |_| 0.0,
            C64::new(1.0, 0.0),
        );
        let a = k.operator_matrix(&g);
        let ones = vec![C64::new(1.0, 0.0); g.len()];
        let got = a.mul_vec(&ones);
        assert!(got.iter().all(|v| (v.re - 0.5).abs() < 1e-14));
    }

    #[test]
    fn squared_kernel_is_pointwise_square() {
        let k = exp_kernel();
        let s = k.squared();
        let a = k.abs_squared();
        for (x, y) in [(0.2, 0.9), (1.5, 0.1)] {
            let v = k.eval(x, y);
            assert!((s.eval(x, y) - v * v).norm() < 1e-15);
            assert!((a.eval(x, y).re - v.norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn graded_edges_respect_breakpoints_and_width() {
        let e = graded_edges(0.0, 30.0, 8, |x| (-x).exp().sqrt(), &[1.0], 2.0);
        assert_eq!(e[0], 0.0);
        assert_eq!(*e.last().unwrap(), 30.0);
        assert!(e.contains(&1.0));
        assert!(e
            .windows(2)
            .all(|w| w[1] > w[0] && w[1] - w[0] <= 2.0 + 1e-12));
        let first = e[1] - e[0];
        assert!(first < 1.0);
    }
}
