//! Revised simplex for `max cᵀa  s.t.  A a = b,  a ≥ 0`.
//!
//! Phase I starts from an all-artificial basis and minimises the sum of the
//! artificials; phase II optimises the real objective from the basis found.
//! Entering and leaving variables follow Bland's smallest-index rule, so
//! degenerate problems terminate and identical inputs always pivot the same
//! way. The basis inverse is kept explicitly and refactorised periodically.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{self, Matrix};
use crate::{Error, Result};

const REFACTOR_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpTolerances {
    /// Largest accepted `‖A a − b‖∞`.
    pub feasibility: f64,
    /// `a(i)` above this counts as positive.
    pub support: f64,
    /// Smallest usable pivot element.
    pub pivot: f64,
    /// Reduced costs above this make a column eligible to enter.
    pub optimality: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        LpTolerances { feasibility: 1e-9, support: 1e-8, pivot: 1e-9, optimality: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Matrix,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, constraints: Matrix, rhs: Vec<f64>) -> Result<Self> {
        if objective.len() != constraints.cols() {
            return Err(Error::DimensionMismatch {
                expected: constraints.cols(),
                found: objective.len(),
            });
        }
        if rhs.len() != constraints.rows() {
            return Err(Error::DimensionMismatch { expected: constraints.rows(), found: rhs.len() });
        }
        let finite = objective.iter().chain(&rhs).all(|x| x.is_finite())
            && (0..constraints.rows()).all(|i| constraints.row(i).iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::NumericalBreakdown("non-finite LP data"));
        }
        Ok(LinearProgram { objective, constraints, rhs })
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &Matrix {
        &self.constraints
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective_value: f64,
    /// Last basic solution visited; the optimal vertex when `status` is optimal.
    pub point: Vec<f64>,
    /// Variables with `point[j] > support` tolerance, ascending.
    pub support: Vec<usize>,
    pub pivots: usize,
}

struct Simplex<'a> {
    a: &'a Matrix,
    /// ±1 per row so that the working right-hand side is nonnegative.
    sign: Vec<f64>,
    b: Vec<f64>,
    n: usize,
    m: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Matrix,
    xb: Vec<f64>,
    tol: LpTolerances,
    pivots: usize,
    since_refactor: usize,
    max_pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<'a> Simplex<'a> {
    fn new(lp: &'a LinearProgram, tol: LpTolerances) -> Self {
        let m = lp.constraints.rows();
        let n = lp.constraints.cols();
        let sign: Vec<f64> = lp.rhs.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let b: Vec<f64> = lp.rhs.iter().zip(&sign).map(|(v, s)| v * s).collect();
        let mut is_basic = vec![false; n + m];
        for flag in &mut is_basic[n..] {
            *flag = true;
        }
        Simplex {
            a: &lp.constraints,
            sign,
            xb: b.clone(),
            b,
            n,
            m,
            basis: (n..n + m).collect(),
            is_basic,
            binv: Matrix::identity(m),
            tol,
            pivots: 0,
            since_refactor: 0,
            max_pivots: 20_000 + 50 * (n + m),
        }
    }

    /// Column `j` of the working matrix `[diag(sign) A | I]`.
    fn column(&self, j: usize) -> Vec<f64> {
        if j < self.n {
            (0..self.m).map(|i| self.a[(i, j)] * self.sign[i]).collect()
        } else {
            let mut e = vec![0.0; self.m];
            e[j - self.n] = 1.0;
            e
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&j| self.column(j)).collect();
        let b = Matrix::from_fn(self.m, self.m, |i, k| cols[k][i]);
        self.binv = linalg::inverse(&b, 1e-13)
            .ok_or(Error::NumericalBreakdown("singular basis on refactorisation"))?;
        self.xb = self.binv.mul_vec(&self.b);
        self.since_refactor = 0;
        Ok(())
    }

    fn pivot(&mut self, row: usize, entering: usize, w: &[f64]) -> Result<()> {
        let m = self.m;
        let p = w[row];
        for j in 0..m {
            self.binv[(row, j)] /= p;
        }
        self.xb[row] /= p;
        for i in 0..m {
            if i == row || w[i] == 0.0 {
                continue;
            }
            let f = w[i];
            for j in 0..m {
                let v = self.binv[(row, j)];
                self.binv[(i, j)] -= f * v;
            }
            self.xb[i] -= f * self.xb[row];
        }
        self.is_basic[self.basis[row]] = false;
        self.is_basic[entering] = true;
        self.basis[row] = entering;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.pivots > self.max_pivots {
            return Err(Error::NumericalBreakdown("pivot budget exhausted"));
        }
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    /// Runs simplex iterations for `costs` (length `n + m`), allowing only
    /// structural columns to enter.
    fn optimise(&mut self, costs: &[f64]) -> Result<Outcome> {
        loop {
            let cb: Vec<f64> = self.basis.iter().map(|&j| costs[j]).collect();
            let y = self.binv.tr_mul_vec(&cb);
            let entering = (0..self.n).find(|&j| {
                !self.is_basic[j] && {
                    let col = self.column(j);
                    costs[j] - linalg::dot(&y, &col) > self.tol.optimality
                }
            });
            let Some(j) = entering else {
                return Ok(Outcome::Optimal);
            };
            let w = self.binv.mul_vec(&self.column(j));

            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let artificial = self.basis[r] >= self.n;
                // Artificials left in the basis after phase I sit at zero on
                // redundant rows; any nonzero entry pivots them out at ratio 0.
                let ratio = if artificial && self.xb[r].abs() <= self.tol.feasibility {
                    if w[r].abs() > self.tol.pivot {
                        0.0
                    } else {
                        continue;
                    }
                } else if w[r] > self.tol.pivot {
                    self.xb[r].max(0.0) / w[r]
                } else {
                    continue;
                };
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * best.abs().max(1.0);
                        if (!tie && ratio < best) || (tie && self.basis[r] < self.basis[br]) {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(row, j, &w)?;
        }
    }

    /// Pivots zero-valued artificials out of the basis where possible.
    fn expel_artificials(&mut self) -> Result<()> {
        for r in 0..self.m {
            if self.basis[r] < self.n {
                continue;
            }
            let row: Vec<f64> = (0..self.m).map(|k| self.binv[(r, k)]).collect();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if self.is_basic[j] {
                    continue;
                }
                let v = linalg::dot(&row, &self.column(j)).abs();
                if v > self.tol.pivot && best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                let w = self.binv.mul_vec(&self.column(j));
                self.pivot(r, j, &w)?;
            }
        }
        Ok(())
    }

    fn point(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (r, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                x[j] = self.xb[r];
            }
        }
        x
    }
}

/// Solves `lp` with the default tolerances.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    solve_with(lp, LpTolerances::default())
}

pub fn solve_with(lp: &LinearProgram, tol: LpTolerances) -> Result<LpSolution> {
    let n = lp.num_vars();
    let m = lp.constraints.rows();
    let mut s = Simplex::new(lp, tol);
    let scale = lp.rhs.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));

    let mut phase1 = vec![0.0; n + m];
    for c in &mut phase1[n..] {
        *c = -1.0;
    }
    s.optimise(&phase1)?;
    s.refactor()?;
    let infeasibility: f64 =
        s.basis.iter().zip(&s.xb).filter(|(&j, _)| j >= n).map(|(_, v)| v.abs()).sum();
    if infeasibility > tol.feasibility * scale {
        return Ok(finish(lp, &s, LpStatus::Infeasible, tol));
    }
    s.expel_artificials()?;

    let mut phase2 = vec![0.0; n + m];
    phase2[..n].copy_from_slice(&lp.objective);
    let outcome = s.optimise(&phase2)?;
    s.refactor()?;
    let status = match outcome {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
    };
    let sol = finish(lp, &s, status, tol);
    if status == LpStatus::Optimal {
        let ax = lp.constraints.mul_vec(&sol.point);
        let residual = ax.iter().zip(&lp.rhs).map(|(x, b)| (x - b).abs()).fold(0.0, f64::max);
        if residual > tol.feasibility * scale {
            return Err(Error::NumericalBreakdown("constraint residual above tolerance"));
        }
    }
    Ok(sol)
}

fn finish(lp: &LinearProgram, s: &Simplex<'_>, status: LpStatus, tol: LpTolerances) -> LpSolution {
    let mut point = s.point();
    for v in &mut point {
        if *v < 0.0 && *v >= -tol.feasibility {
            *v = 0.0;
        }
    }
    let objective_value = linalg::dot(&lp.objective, &point);
    let support = (0..point.len()).filter(|&j| point[j] > tol.support).collect();
    LpSolution { status, objective_value, point, support, pivots: s.pivots }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], a: &[&[f64]], b: &[f64]) -> LinearProgram {
        let m = Matrix::from_fn(a.len(), c.len(), |i, j| a[i][j]);
        LinearProgram::new(c.to_vec(), m, b.to_vec()).unwrap()
    }

    #[test]
    fn simple_optimum() {
        // max x + 2y  s.t. x + y + s = 4, x + 3y + u = 6
        let p = lp(&[1.0, 2.0, 0.0, 0.0], &[&[1.0, 1.0, 1.0, 0.0], &[1.0, 3.0, 0.0, 1.0]], &[4.0, 6.0]);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 5.0).abs() < 1e-12);
        assert!((s.point[0] - 3.0).abs() < 1e-12 && (s.point[1] - 1.0).abs() < 1e-12);
        assert_eq!(s.support, vec![0, 1]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(&[1.0, 1.0], &[&[1.0, 1.0]], &[-1.0]);
        assert_eq!(solve(&p).unwrap().status, LpStatus::Infeasible);
        let p = lp(&[1.0, 0.0], &[&[1.0, -1.0]], &[1.0]);
        assert_eq!(solve(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        // second row duplicates the first with a sign flip
        let p = lp(&[0.0, 1.0, 0.0], &[&[1.0, 1.0, 1.0], &[-1.0, -1.0, -1.0]], &[2.0, -2.0]);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_objective_returns_feasible_point() {
        let p = lp(&[0.0; 3], &[&[1.0, 1.0, 1.0], &[0.0, 1.0, 1.0]], &[3.0, 2.0]);
        let s = solve(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective_value, 0.0);
        let ax = p.constraints().mul_vec(&s.point);
        assert!((ax[0] - 3.0).abs() < 1e-12 && (ax[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let m = Matrix::zeros(2, 3);
        assert!(LinearProgram::new(vec![0.0; 2], m.clone(), vec![0.0; 2]).is_err());
        assert!(LinearProgram::new(vec![0.0; 3], m.clone(), vec![0.0; 3]).is_err());
        assert!(LinearProgram::new(vec![f64::NAN, 0.0, 0.0], m, vec![0.0; 2]).is_err());
    }
}
