//! Small dense linear algebra: row-major matrices, Householder QR with column
//! pivoting for rank, ordered column selection, Cholesky, Gauss-Jordan.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Rows picked by `rows`, all columns.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)])
    }

    /// Columns picked by `cols`, all rows.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += a * xi;
                }
            }
        }
        out
    }

    /// `selfᵀ diag(w) self`.
    pub fn weighted_gram(&self, w: &[f64]) -> Matrix {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for (i, &wi) in w.iter().enumerate() {
            let r = self.row(i);
            for a in 0..self.cols {
                let ra = r[a] * wi;
                if ra == 0.0 {
                    continue;
                }
                for b in a..self.cols {
                    g[(a, b)] += ra * r[b];
                }
            }
        }
        for a in 0..self.cols {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
        g
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Threshold below which a pivot (or residual column norm) counts as zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RankTolerance {
    /// `max(rows, cols) · ε · largest pivot`.
    #[default]
    Default,
    /// `rel · largest pivot`.
    Relative(f64),
}

impl RankTolerance {
    pub fn threshold(self, rows: usize, cols: usize, largest: f64) -> f64 {
        let rel = match self {
            RankTolerance::Default => rows.max(cols) as f64 * f64::EPSILON,
            RankTolerance::Relative(r) => r,
        };
        rel * largest
    }
}

/// Columns of `a` as separate vectors, for the QR routines.
fn columns(a: &Matrix) -> Vec<Vec<f64>> {
    (0..a.cols).map(|j| a.column(j)).collect()
}

/// Applies the reflector `I - 2 v vᵀ / vᵀv` (acting on rows `k..`) to `x`.
fn reflect(v: &[f64], k: usize, x: &mut [f64]) {
    let vv = dot(v, v);
    if vv == 0.0 {
        return;
    }
    let s = 2.0 * dot(v, &x[k..]) / vv;
    for (xi, vi) in x[k..].iter_mut().zip(v) {
        *xi -= s * vi;
    }
}

/// Householder vector zeroing `x[k+1..]`; returns `(v, new diagonal)`.
fn householder(x: &[f64], k: usize) -> (Vec<f64>, f64) {
    let tail = &x[k..];
    let alpha = norm(tail);
    let mut v = tail.to_vec();
    let diag = if tail[0] > 0.0 { -alpha } else { alpha };
    v[0] -= diag;
    (v, diag)
}

/// Numerical rank via Householder QR with greedy max-norm column pivoting.
pub fn rank(a: &Matrix, tol: RankTolerance) -> usize {
    let mut cols = columns(a);
    let n = cols.len();
    let m = a.rows;
    if n == 0 || m == 0 {
        return 0;
    }
    let mut threshold = None;
    let mut r = 0;
    for k in 0..n.min(m) {
        let (best, best_norm) = (k..n)
            .map(|j| (j, norm(&cols[j][k..])))
            .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        let thr = *threshold.get_or_insert_with(|| tol.threshold(m, n, best_norm));
        if best_norm <= thr || best_norm == 0.0 {
            break;
        }
        cols.swap(k, best);
        let (v, _) = householder(&cols[k], k);
        for c in cols.iter_mut().skip(k) {
            reflect(&v, k, c);
        }
        r += 1;
    }
    r
}

/// Greedy column selection in the given order: column `j` is kept when it is
/// not (numerically) in the span of the columns kept before it. This is QR
/// with pivoting restricted to moving dependent columns to the back.
pub fn independent_columns(a: &Matrix, tol: RankTolerance) -> Vec<usize> {
    let m = a.rows;
    let n = a.cols;
    let largest = (0..n).map(|j| norm(&a.column(j))).fold(0.0, f64::max);
    let thr = tol.threshold(m, n, largest);
    let mut reflectors: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    for j in 0..n {
        if kept.len() == m {
            break;
        }
        let mut c = a.column(j);
        for (k, v) in reflectors.iter().enumerate() {
            reflect(v, k, &mut c);
        }
        let k = kept.len();
        let residual = norm(&c[k..]);
        if residual > thr && residual > 0.0 {
            let (v, _) = householder(&c, k);
            reflectors.push(v);
            kept.push(j);
        }
    }
    kept
}

/// Lower Cholesky factor of a symmetric positive definite matrix, or `None`
/// if a pivot is not safely positive.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.rows;
    let mut l = Matrix::zeros(n, n);
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= scale * 1e-14 {
            return None;
        }
        let d = libm::sqrt(d);
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the lower factor.
pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Diagonal of `(L Lᵀ)⁻¹`.
pub fn cholesky_inverse_diag(l: &Matrix) -> Vec<f64> {
    let n = l.rows;
    (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cholesky_solve(l, &e)[j]
        })
        .collect()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting. Returns `None`
/// when a pivot falls below `pivot_tol` times the largest entry.
pub fn inverse(a: &Matrix, pivot_tol: f64) -> Option<Matrix> {
    let n = a.rows;
    let mut m = a.clone();
    let mut inv = Matrix::identity(n);
    let scale = a.data.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..n {
        let (p, pv) = (col..n)
            .map(|r| (r, m[(r, col)].abs()))
            .fold((col, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if pv <= pivot_tol * scale.max(1.0) {
            return None;
        }
        if p != col {
            for j in 0..n {
                m.data.swap(p * n + j, col * n + j);
                inv.data.swap(p * n + j, col * n + j);
            }
        }
        let d = m[(col, col)];
        for j in 0..n {
            m[(col, j)] /= d;
            inv[(col, j)] /= d;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[(r, col)];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                m[(r, j)] -= f * m[(col, j)];
                inv[(r, j)] -= f * inv[(col, j)];
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_columns() {
        // third column = first + second
        let a = Matrix::from_fn(4, 3, |i, j| match j {
            0 => 1.0,
            1 => (i % 2) as f64,
            _ => 1.0 + (i % 2) as f64,
        });
        assert_eq!(rank(&a, RankTolerance::Default), 2);
        assert_eq!(independent_columns(&a, RankTolerance::Default), vec![0, 1]);
        assert_eq!(rank(&Matrix::identity(5), RankTolerance::Default), 5);
        assert_eq!(rank(&Matrix::zeros(3, 2), RankTolerance::Default), 0);
    }

    #[test]
    fn selection_respects_order() {
        // columns: zero, e0, e0 again, e1
        let a = Matrix::from_fn(3, 4, |i, j| match (i, j) {
            (0, 1) | (0, 2) | (1, 3) => 1.0,
            _ => 0.0,
        });
        assert_eq!(independent_columns(&a, RankTolerance::Default), vec![1, 3]);
    }

    #[test]
    fn cholesky_and_inverse() {
        let a = Matrix::from_fn(3, 3, |i, j| if i == j { 4.0 } else { 1.0 });
        let l = cholesky(&a).unwrap();
        let x = cholesky_solve(&l, &[6.0, 6.0, 6.0]);
        for xi in &x {
            assert!((xi - 1.0).abs() < 1e-14);
        }
        let inv = inverse(&a, 1e-12).unwrap();
        let diag = cholesky_inverse_diag(&l);
        for i in 0..3 {
            assert!((inv[(i, i)] - diag[i]).abs() < 1e-14);
        }
        let singular = Matrix::from_fn(2, 2, |_, _| 1.0);
        assert!(inverse(&singular, 1e-12).is_none());
        assert!(cholesky(&singular).is_none());
    }
}
