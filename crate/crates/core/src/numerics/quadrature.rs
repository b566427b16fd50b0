//! Composite Gauss–Legendre rules and the local interpolation tools that
//! product integration needs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Measure the grid weights discretize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// dx
    Lebesgue,
    /// r dr
    Radial,
}

/// Gauss–Legendre nodes and weights on [-1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[i] = -t;
        nodes[n - 1 - i] = t;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Reference rule on [-1, 1] with barycentric interpolation weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    bary: Vec<f64>,
}

impl ReferenceRule {
    pub fn new(k: usize) -> Self {
        let (nodes, weights) = gauss_legendre(k);
        let bary = (0..k)
            .map(|j| {
                let prod: f64 = (0..k)
                    .filter(|&m| m != j)
                    .map(|m| nodes[j] - nodes[m])
                    .product();
                1.0 / prod
            })
            .collect();
        Self {
            nodes,
            weights,
            bary,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values of every Lagrange basis polynomial at `t`.
    pub fn lagrange(&self, t: f64, out: &mut [f64]) {
        if let Some(j) = self.nodes.iter().position(|&n| n == t) {
            out.iter_mut().for_each(|o| *o = 0.0);
            out[j] = 1.0;
            return;
        }
        let mut total = 0.0;
        for j in 0..self.len() {
            out[j] = self.bary[j] / (t - self.nodes[j]);
            total += out[j];
        }
        out.iter_mut().for_each(|o| *o /= total);
    }

    /// Row-major matrix of `∫_{-1}^{t_i} l_j(t) dt`.
    pub fn cumulative_matrix(&self) -> Vec<f64> {
        let k = self.len();
        let mut s = vec![0.0; k * k];
        let mut basis = vec![0.0; k];
        for i in 0..k {
            let half = 0.5 * (self.nodes[i] + 1.0);
            for q in 0..k {
                let t = -1.0 + half * (self.nodes[q] + 1.0);
                self.lagrange(t, &mut basis);
                for j in 0..k {
                    s[i * k + j] += half * self.weights[q] * basis[j];
                }
            }
        }
        s
    }

    /// Row-major matrix of `l_j'(t_i)`.
    pub fn differentiation_matrix(&self) -> Vec<f64> {
        let k = self.len();
        let mut d = vec![0.0; k * k];
        for i in 0..k {
            let mut diag = 0.0;
            for j in 0..k {
                if i != j {
                    let v = self.bary[j] / self.bary[i] / (self.nodes[i] - self.nodes[j]);
                    d[i * k + j] = v;
                    diag -= v;
                }
            }
            d[i * k + i] = diag;
        }
        d
    }
}

/// Composite rule: equal node count per panel, nodes ordered panel by panel.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub panels: Vec<(f64, f64)>,
    pub weight_kind: WeightKind,
    pub nodes_per_panel: usize,
    pub(crate) rule: ReferenceRule,
}

impl QuadratureGrid {
    /// Builds the rule on the panels delimited by `edges`.
    pub fn from_edges(
        edges: &[f64],
        nodes_per_panel: usize,
        weight_kind: WeightKind,
    ) -> Result<Self> {
        if !(2..=64).contains(&nodes_per_panel) {
            return Err(Error::Parameter(format!(
                "nodes_per_panel must lie in [2, 64], got {nodes_per_panel}"
            )));
        }
        if edges.len() < 2 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter(
                "panel edges must be strictly increasing".into(),
            ));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::Parameter("panel edges must be finite".into()));
        }
        if weight_kind == WeightKind::Radial && edges[0] < 0.0 {
            return Err(Error::Parameter("radial grids need a >= 0".into()));
        }
        let rule = ReferenceRule::new(nodes_per_panel);
        let n_panels = edges.len() - 1;
        let mut nodes = Vec::with_capacity(n_panels * nodes_per_panel);
        let mut weights = Vec::with_capacity(n_panels * nodes_per_panel);
        let mut panels = Vec::with_capacity(n_panels);
        for w in edges.windows(2) {
            let (l, r) = (w[0], w[1]);
            let half = 0.5 * (r - l);
            let mid = 0.5 * (r + l);
            for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
                let x = mid + half * t;
                nodes.push(x);
                weights.push(match weight_kind {
                    WeightKind::Lebesgue => half * wt,
                    WeightKind::Radial => half * wt * x,
                });
            }
            panels.push((l, r));
        }
        Ok(Self {
            nodes,
            weights,
            panels,
            weight_kind,
            nodes_per_panel,
            rule,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn a(&self) -> f64 {
        self.panels[0].0
    }

    pub fn b(&self) -> f64 {
        self.panels[self.panels.len() - 1].1
    }

    pub fn reference_rule(&self) -> &ReferenceRule {
        &self.rule
    }

    /// Density of the measure relative to dx at a point.
    pub fn density(&self, x: f64) -> f64 {
        match self.weight_kind {
            WeightKind::Lebesgue => 1.0,
            WeightKind::Radial => x,
        }
    }

    /// Weights for plain dx integration.
    pub fn lebesgue_weights(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.nodes)
            .map(|(w, x)| w / self.density(*x))
            .collect()
    }

    pub fn integrate<F: Fn(f64) -> T, T>(&self, f: F) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(*x) * *w)
            .sum()
    }

    /// Node index range of panel `p`.
    pub fn panel_range(&self, p: usize) -> std::ops::Range<usize> {
        p * self.nodes_per_panel..(p + 1) * self.nodes_per_panel
    }

    pub fn panel_of(&self, i: usize) -> usize {
        i / self.nodes_per_panel
    }
}

/// Composite Gauss–Legendre rule with `n_panels` equal panels on (a, b).
pub fn gauss_legendre_panels(
    a: f64,
    b: f64,
    n_panels: usize,
    nodes_per_panel: usize,
    weight_kind: WeightKind,
) -> Result<QuadratureGrid> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Parameter(format!(
            "need finite a < b, got ({a}, {b})"
        )));
    }
    if n_panels == 0 {
        return Err(Error::Parameter("n_panels must be at least 1".into()));
    }
    let edges: Vec<f64> = (0..=n_panels)
        .map(|p| {
            if p == n_panels {
                b
            } else {
                a + (b - a) * p as f64 / n_panels as f64
            }
        })
        .collect();
    QuadratureGrid::from_edges(&edges, nodes_per_panel, weight_kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule_on_unit_interval() {
        let g = gauss_legendre_panels(0.0, 1.0, 1, 2, WeightKind::Lebesgue).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((g.nodes[0] - (1.0 - s) / 2.0).abs() < 1e-15);
        assert!((g.nodes[1] - (1.0 + s) / 2.0).abs() < 1e-15);
        assert!((g.weights[0] - 0.5).abs() < 1e-15 && (g.weights[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn radial_weights_sum_to_half() {
        let g = gauss_legendre_panels(0.0, 1.0, 1, 4, WeightKind::Radial).unwrap();
        assert!((g.weights.iter().sum::<f64>() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn exponential_on_long_interval() {
        let g = gauss_legendre_panels(0.0, 30.0, 8, 16, WeightKind::Lebesgue).unwrap();
        let got = g.integrate(|x| (-x).exp());
        assert!((got - (1.0 - (-30f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn large_rules_are_accurate() {
        for k in [16, 25, 40, 64] {
            let (x, w) = gauss_legendre(k);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let m: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * x.powi(2 * k as i32 - 2))
                .sum();
            assert!((m - 2.0 / (2 * k - 1) as f64).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gauss_legendre_panels(1.0, 0.0, 1, 4, WeightKind::Lebesgue).is_err());
        assert!(gauss_legendre_panels(0.0, 1.0, 0, 4, WeightKind::Lebesgue).is_err());
        assert!(gauss_legendre_panels(0.0, 1.0, 1, 1, WeightKind::Lebesgue).is_err());
        assert!(gauss_legendre_panels(0.0, 1.0, 1, 65, WeightKind::Lebesgue).is_err());
    }

    #[test]
    fn cumulative_matrix_integrates_polynomials() {
        let rule = ReferenceRule::new(8);
        let s = rule.cumulative_matrix();
        // ∫_{-1}^{t} 3u^2 du = t^3 + 1
        for i in 0..8 {
            let row: f64 = (0..8)
                .map(|j| s[i * 8 + j] * 3.0 * rule.nodes[j].powi(2))
                .sum();
            assert!((row - (rule.nodes[i].powi(3) + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn differentiation_matrix_is_exact_on_polynomials() {
        let rule = ReferenceRule::new(10);
        let d = rule.differentiation_matrix();
        for i in 0..10 {
            let row: f64 = (0..10).map(|j| d[i * 10 + j] * rule.nodes[j].powi(5)).sum();
            assert!((row - 5.0 * rule.nodes[i].powi(4)).abs() < 1e-11);
        }
    }

    #[test]
    fn lagrange_basis_reproduces_interpolant() {
        let rule = ReferenceRule::new(6);
        let mut l = vec![0.0; 6];
        rule.lagrange(0.3, &mut l);
        let p: f64 = (0..6).map(|j| l[j] * rule.nodes[j].powi(4)).sum();
        assert!((p - 0.3f64.powi(4)).abs() < 1e-14);
        rule.lagrange(rule.nodes[2], &mut l);
        assert_eq!(l[2], 1.0);
    }
}
