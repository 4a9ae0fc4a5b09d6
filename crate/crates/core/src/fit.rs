//! Extended maximum likelihood on the facial set.
//!
//! Cells off the face are treated as structural zeros. On the remaining rows
//! `X_F` has rank `d_F ≤ d`; a maximal set of independent columns is kept
//! (earlier columns first, so lower-order terms win) and the Poisson
//! log-likelihood `Σ n log m − Σ m` is maximised over that column space by
//! Newton's method with step halving. Columns not kept are aliased and carry
//! no estimate.

use alloc::vec;
use alloc::vec::Vec;

use crate::design::{build_design_with, ColumnLabel, DesignMatrix};
use crate::facial::FacialSet;
use crate::formula::ModelFormula;
use crate::linalg::{self, Matrix, RankTolerance};
use crate::table::ContingencyTable;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Converged once `‖Xᵀ(n − m)‖∞ ≤ gradient_tol · max(1, N)`.
    pub gradient_tol: f64,
    pub rank: RankTolerance,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iterations: 100, gradient_tol: 1e-10, rank: RankTolerance::Default }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// `m̂(i)` per cell; zero off the face.
    pub fitted_means: Vec<f64>,
    /// Estimate per design column, `None` where aliased.
    pub coefficients: Vec<Option<f64>>,
    /// Standard error per design column, `None` where aliased or unavailable.
    pub std_errors: Vec<Option<f64>>,
    /// Design columns kept in the reduced design `X_F*`, ascending.
    pub estimable_columns: Vec<usize>,
    pub labels: Vec<ColumnLabel>,
    pub loglik: f64,
    pub deviance: f64,
    /// `|I_F| − d_F`.
    pub residual_df: usize,
    pub model_dimension: usize,
    pub face_dimension: usize,
    pub facial_set_size: usize,
    /// Grand total `N`.
    pub total: u64,
    pub bic: f64,
    pub cbic: f64,
    pub iterations: usize,
    /// `‖(X_F*)ᵀ(m̂_F − n_F)‖∞` at the returned estimate.
    pub moment_residual: f64,
}

impl FitResult {
    /// Design columns that could not be estimated.
    pub fn aliased(&self) -> Vec<usize> {
        (0..self.coefficients.len()).filter(|&j| self.coefficients[j].is_none()).collect()
    }
}

/// `Σ n(i) log m̂(i) − Σ m̂(i)` over all cells, with `0 · log 0 = 0`.
pub fn loglik(result: &FitResult, table: &ContingencyTable) -> f64 {
    poisson_loglik(table.counts(), &result.fitted_means)
}

/// `l̂ − (d/2) log N`.
pub fn bic(result: &FitResult, total: u64) -> f64 {
    result.loglik - result.model_dimension as f64 / 2.0 * libm::log(total as f64)
}

/// `l̂ − (d_F/2) log N`.
pub fn cbic(result: &FitResult, total: u64) -> f64 {
    result.loglik - result.face_dimension as f64 / 2.0 * libm::log(total as f64)
}

pub fn standard_errors(result: &FitResult) -> &[Option<f64>] {
    &result.std_errors
}

fn poisson_loglik(counts: &[u64], means: &[f64]) -> f64 {
    counts
        .iter()
        .zip(means)
        .map(|(&n, &m)| {
            let n = n as f64;
            if m > 0.0 {
                n * libm::log(m) - m
            } else if n == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        })
        .sum()
}

fn deviance(counts: &[f64], means: &[f64]) -> f64 {
    2.0 * counts
        .iter()
        .zip(means)
        .map(|(&n, &m)| {
            let lr = if n > 0.0 { n * libm::log(n / m) } else { 0.0 };
            lr - (n - m)
        })
        .sum::<f64>()
}

struct Newton {
    theta: Vec<f64>,
    means: Vec<f64>,
    iterations: usize,
    converged: bool,
    gradient: f64,
    chol: Option<Matrix>,
}

fn objective(x: &Matrix, n: &[f64], theta: &[f64]) -> (f64, Vec<f64>) {
    let eta = x.mul_vec(theta);
    let mut value = 0.0;
    let means: Vec<f64> = eta
        .iter()
        .zip(n)
        .map(|(&e, &ni)| {
            let m = libm::exp(e);
            value += ni * e - m;
            m
        })
        .collect();
    (value, means)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Maximises `Σ n η − Σ exp(η)` with `η = X θ`.
fn newton(x: &Matrix, n: &[f64], theta0: Vec<f64>, max_iter: usize, tol: f64) -> Newton {
    let mut theta = theta0;
    let (mut value, mut means) = objective(x, n, &theta);
    let mut iterations = 0;
    loop {
        let resid: Vec<f64> = n.iter().zip(&means).map(|(a, b)| a - b).collect();
        let grad = x.tr_mul_vec(&resid);
        let gnorm = max_abs(&grad);
        let chol = linalg::cholesky(&x.weighted_gram(&means));
        if gnorm <= tol || iterations >= max_iter || !gnorm.is_finite() {
            return Newton { theta, means, iterations, converged: gnorm <= tol, gradient: gnorm, chol };
        }
        let Some(l) = chol else {
            return Newton { theta, means, iterations, converged: false, gradient: gnorm, chol: None };
        };
        let step = linalg::cholesky_solve(&l, &grad);
        iterations += 1;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(t, s)| t + scale * s).collect();
            let (v, m) = objective(x, n, &trial);
            // near the optimum the change is below rounding of the sum
            let slack = 1e-13 * (1.0 + value.abs());
            if v.is_finite() && v >= value - slack {
                theta = trial;
                value = v;
                means = m;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            // No ascent left at machine precision: report the current point.
            let resid: Vec<f64> = n.iter().zip(&means).map(|(a, b)| a - b).collect();
            let gnorm = max_abs(&x.tr_mul_vec(&resid));
            let chol = linalg::cholesky(&x.weighted_gram(&means));
            return Newton { theta, means, iterations, converged: gnorm <= tol, gradient: gnorm, chol };
        }
    }
}

pub fn fit(table: &ContingencyTable, model: &ModelFormula, fs: &FacialSet) -> Result<FitResult> {
    let opts = FitOptions::default();
    let design = build_design_with(table, model, opts.rank)?;
    fit_with(table, &design, fs, &opts)
}

fn face_rows(table: &ContingencyTable, design: &DesignMatrix, fs: &FacialSet) -> Result<Vec<usize>> {
    if fs.in_face.len() != table.num_cells() || design.num_rows() != table.num_cells() {
        return Err(Error::DimensionMismatch { expected: table.num_cells(), found: fs.in_face.len() });
    }
    if table.total() == 0 {
        return Err(Error::EmptyTable);
    }
    if table.counts().iter().zip(&fs.in_face).any(|(&n, &f)| n > 0 && !f) {
        return Err(Error::InconsistentFacialSet);
    }
    Ok(fs.cells())
}

pub fn fit_with(
    table: &ContingencyTable,
    design: &DesignMatrix,
    fs: &FacialSet,
    opts: &FitOptions,
) -> Result<FitResult> {
    let rows = face_rows(table, design, fs)?;
    let xf = design.matrix().select_rows(&rows);
    let columns = linalg::independent_columns(&xf, opts.rank);
    if columns.len() != fs.face_dimension {
        return Err(Error::InvalidColumnSelection("selected columns disagree with face dimension"));
    }
    fit_selected(table, design, &rows, &xf, columns, opts)
}

/// Fits with a caller-chosen set of `d_F` design columns that are linearly
/// independent on the face. Fitted means do not depend on the choice.
pub fn fit_with_columns(
    table: &ContingencyTable,
    design: &DesignMatrix,
    fs: &FacialSet,
    columns: &[usize],
    opts: &FitOptions,
) -> Result<FitResult> {
    let rows = face_rows(table, design, fs)?;
    let xf = design.matrix().select_rows(&rows);
    let mut cols = columns.to_vec();
    cols.sort_unstable();
    cols.dedup();
    if cols.len() != columns.len() || cols.last().is_some_and(|&c| c >= design.dimension()) {
        return Err(Error::InvalidColumnSelection("duplicate or out-of-range column"));
    }
    if cols.len() != fs.face_dimension {
        return Err(Error::InvalidColumnSelection("need exactly d_F columns"));
    }
    if linalg::rank(&xf.select_cols(&cols), opts.rank) != cols.len() {
        return Err(Error::InvalidColumnSelection("columns are dependent on the face"));
    }
    fit_selected(table, design, &rows, &xf, cols, opts)
}

fn fit_selected(
    table: &ContingencyTable,
    design: &DesignMatrix,
    rows: &[usize],
    xf: &Matrix,
    columns: Vec<usize>,
    opts: &FitOptions,
) -> Result<FitResult> {
    let total = table.total();
    let nf: Vec<f64> = rows.iter().map(|&i| table.counts()[i] as f64).collect();
    let xstar = xf.select_cols(&columns);

    let mut theta0 = vec![0.0; columns.len()];
    if let Some(k) = columns.iter().position(|&c| c == 0) {
        theta0[k] = libm::log(total as f64 / rows.len() as f64);
    }
    let tol = opts.gradient_tol * (total as f64).max(1.0);
    let sol = newton(&xstar, &nf, theta0, opts.max_iterations, tol);
    if !sol.converged {
        return Err(Error::NonConvergence { iterations: sol.iterations, gradient: sol.gradient });
    }

    let d = design.dimension();
    let mut coefficients = vec![None; d];
    let mut std_errors = vec![None; d];
    let variances = sol.chol.as_ref().map(linalg::cholesky_inverse_diag);
    for (k, &c) in columns.iter().enumerate() {
        coefficients[c] = Some(sol.theta[k]);
        std_errors[c] = variances
            .as_ref()
            .map(|v| v[k])
            .filter(|v| v.is_finite() && *v > 0.0)
            .map(libm::sqrt);
    }

    let mut fitted_means = vec![0.0; table.num_cells()];
    for (&i, &m) in rows.iter().zip(&sol.means) {
        fitted_means[i] = m;
    }
    let face_counts: Vec<u64> = rows.iter().map(|&i| table.counts()[i]).collect();
    let loglik = poisson_loglik(&face_counts, &sol.means);
    let log_n = libm::log(total as f64);
    let face_dimension = columns.len();

    Ok(FitResult {
        fitted_means,
        coefficients,
        std_errors,
        labels: design.labels().to_vec(),
        loglik,
        deviance: deviance(&nf, &sol.means),
        residual_df: rows.len() - face_dimension,
        model_dimension: d,
        face_dimension,
        facial_set_size: rows.len(),
        total,
        bic: loglik - d as f64 / 2.0 * log_n,
        cbic: loglik - face_dimension as f64 / 2.0 * log_n,
        iterations: sol.iterations,
        moment_residual: sol.gradient,
        estimable_columns: columns,
    })
}

/// Outcome of fitting on every cell, ignoring the facial set.
#[derive(Debug, Clone, PartialEq)]
pub struct UnrestrictedFit {
    pub converged: bool,
    pub iterations: usize,
    pub fitted_means: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl UnrestrictedFit {
    pub fn max_abs_coefficient(&self) -> f64 {
        max_abs(&self.coefficients)
    }
}

/// Plain Newton fit over all cells and all design columns, stopped after
/// `max_iterations`. When the MLE does not exist some coefficients run off
/// to infinity and some means toward zero instead of converging.
pub fn fit_unrestricted(
    table: &ContingencyTable,
    design: &DesignMatrix,
    max_iterations: usize,
) -> Result<UnrestrictedFit> {
    if design.num_rows() != table.num_cells() {
        return Err(Error::DimensionMismatch { expected: table.num_cells(), found: design.num_rows() });
    }
    if table.total() == 0 {
        return Err(Error::EmptyTable);
    }
    let n: Vec<f64> = table.counts().iter().map(|&c| c as f64).collect();
    let mut theta0 = vec![0.0; design.dimension()];
    theta0[0] = libm::log(table.total() as f64 / table.num_cells() as f64);
    let tol = FitOptions::default().gradient_tol * (table.total() as f64).max(1.0);
    let sol = newton(design.matrix(), &n, theta0, max_iterations, tol);
    Ok(UnrestrictedFit {
        converged: sol.converged,
        iterations: sol.iterations,
        fitted_means: sol.means,
        coefficients: sol.theta,
    })
}
