//! Dense complex matrices with a partially pivoted LU engine.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::numerics::C64;
use crate::report::{IdentityReport, Side};

/// Relative pivot threshold for singularity detection.
pub const DEFAULT_PIVOT_THRESHOLD: f64 = 1e-13;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Parameter(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::Parameter(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// trace(A·A) without forming the product.
    pub fn trace_of_square(&self) -> C64 {
        let n = self.rows;
        let mut t = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                t += self[(i, j)] * self[(j, i)];
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn max_row_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// I + self.
    pub fn plus_identity(&self) -> ComplexMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += 1.0;
        }
        m
    }

    /// diag(left) · self · diag(right).
    pub fn scale_rows_cols(&self, left: &[C64], right: &[C64]) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            left[i] * self[(i, j)] * right[j]
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Partially pivoted LU factorization PA = LU.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    sign: f64,
    min_pivot: f64,
    scale: f64,
}

impl Lu {
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Parameter(format!(
                "LU needs a square matrix, got {}x{}",
                m.rows, m.cols
            )));
        }
        let n = m.rows;
        let scale = m.max_row_norm();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            min_pivot = min_pivot.min(pmax);
            let pivot = lu[(k, k)];
            if pivot == C64::new(0.0, 0.0) {
                continue;
            }
            let inv = 1.0 / pivot;
            for i in k + 1..n {
                let f = lu[(i, k)] * inv;
                lu[(i, k)] = f;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                let (top, bottom) = lu.data.split_at_mut(i * n);
                let krow = &top[k * n + k + 1..k * n + n];
                let irow = &mut bottom[k + 1..n];
                for (a, b) in irow.iter_mut().zip(krow) {
                    *a -= f * b;
                }
            }
        }
        Ok(Self {
            lu,
            perm,
            sign,
            min_pivot,
            scale,
        })
    }

    pub fn det(&self) -> C64 {
        let n = self.lu.rows;
        let mut d = C64::new(self.sign, 0.0);
        for i in 0..n {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// Smallest pivot magnitude met during elimination.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, rhs: &[C64], threshold: f64) -> Result<Vec<C64>> {
        let n = self.lu.rows;
        if rhs.len() != n {
            return Err(Error::Parameter(format!(
                "rhs has length {}, need {n}",
                rhs.len()
            )));
        }
        let limit = threshold * self.scale;
        if !(self.min_pivot > limit) {
            return Err(Error::Singular {
                pivot: self.min_pivot,
                threshold: limit,
            });
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: C64 = row[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: C64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(a, b)| a * b)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        Ok(x)
    }
}

/// Determinant by pivoted LU.
pub fn det_lu(m: &ComplexMatrix) -> Result<C64> {
    Ok(Lu::new(m)?.det())
}

/// det(I + A)·exp(−tr A).
pub fn det2_from_matrix(a: &ComplexMatrix) -> Result<C64> {
    if !a.is_square() {
        return Err(Error::Parameter("det2 needs a square matrix".into()));
    }
    Ok(det_lu(&a.plus_identity())? * (-a.trace()).exp())
}

/// Solves M x = rhs with the default pivot threshold.
pub fn solve_linear(m: &ComplexMatrix, rhs: &[C64]) -> Result<Vec<C64>> {
    solve_linear_with_threshold(m, rhs, DEFAULT_PIVOT_THRESHOLD)
}

pub fn solve_linear_with_threshold(
    m: &ComplexMatrix,
    rhs: &[C64],
    threshold: f64,
) -> Result<Vec<C64>> {
    Lu::new(m)?.solve(rhs, threshold)
}

/// Compares det(I_N − AB) with det(I_M − BA).
pub fn commuted_det_identity_check(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<IdentityReport> {
    if a.cols != b.rows || b.cols != a.rows {
        return Err(Error::Parameter(format!(
            "incompatible shapes {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let neg = |m: ComplexMatrix| ComplexMatrix {
        data: m.data.iter().map(|v| -v).collect(),
        ..m
    };
    let lhs = det_lu(&neg(a.matmul(b)?).plus_identity())?;
    let rhs = det_lu(&neg(b.matmul(a)?).plus_identity())?;
    Ok(IdentityReport::new(
        "commuted_determinant",
        None,
        vec![
            Side::new("det_I_minus_AB", lhs, &["lu"]),
            Side::new("det_I_minus_BA", rhs, &["lu"]),
        ],
        1e-12,
        Default::default(),
    ))
}
