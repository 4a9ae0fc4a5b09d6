//! Facial-set search.
//!
//! The face of the marginal cone containing `t` in its relative interior is
//! identified by the cells whose design rows lie on it. Only the zero pattern
//! of the table matters, so the search works with the indicator of positive
//! counts. Starting from the zero cells `A`, each round maximises
//! `Σ_{i∈A} a(i)` over `{a ≥ 0 : Xᵀa = t'}` and drops from `A` every cell the
//! optimal vertex makes positive. When the optimum puts no mass on `A`, the
//! cells left in `A` are exactly those off the face.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::design::{build_design_with, sufficient_statistic, DesignMatrix};
use crate::formula::ModelFormula;
use crate::linalg::{self, Matrix, RankTolerance};
use crate::lp::{self, LinearProgram, LpStatus, LpTolerances};
use crate::table::ContingencyTable;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FacialOptions {
    pub lp: LpTolerances,
    pub rank: RankTolerance,
    /// Present the LP variables in reverse cell order. The facial set is
    /// unique, so this must not change the answer.
    pub reverse_variable_order: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// No zero cells to begin with.
    InitialAEmpty,
    /// Every zero cell was shown to carry mass in some feasible solution.
    AllCellsInFace,
    /// The LP optimum put no mass on the remaining zero cells.
    OptimalZero,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::InitialAEmpty => "No zero cells",
            Termination::AllCellsInFace => "All zero cells in face",
            Termination::OptimalZero => "Optimal objective value 0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacialSet {
    /// One flag per cell, in table order.
    pub in_face: Vec<bool>,
    /// `d_F = rank(X_F)`.
    pub face_dimension: usize,
    /// Model dimension `d` of the design the search ran against.
    pub model_dimension: usize,
    /// Rounds of the search loop (LP solves for the oracle).
    pub iterations: usize,
    pub termination: Termination,
    /// Cells dropped from `A` in each round.
    pub removed_per_iteration: Vec<Vec<usize>>,
}

impl FacialSet {
    /// Cells on the face, ascending.
    pub fn cells(&self) -> Vec<usize> {
        (0..self.in_face.len()).filter(|&i| self.in_face[i]).collect()
    }

    /// Cells off the face: zeros that behave as structural zeros.
    pub fn excluded(&self) -> Vec<usize> {
        (0..self.in_face.len()).filter(|&i| !self.in_face[i]).collect()
    }

    pub fn len(&self) -> usize {
        self.in_face.iter().filter(|&&f| f).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Whether the ordinary MLE exists, i.e. every cell is on the face.
pub fn mle_exists(fs: &FacialSet) -> bool {
    fs.in_face.iter().all(|&f| f)
}

pub fn find_facial_set(table: &ContingencyTable, model: &ModelFormula) -> Result<FacialSet> {
    let opts = FacialOptions::default();
    let design = build_design_with(table, model, opts.rank)?;
    find_facial_set_with(table, &design, &opts)
}

/// LP over the binarized statistic, with variables optionally reversed.
struct FaceLp {
    order: Vec<usize>,
    constraints: Matrix,
    rhs: Vec<f64>,
    total: f64,
}

impl FaceLp {
    fn new(table: &ContingencyTable, design: &DesignMatrix, reverse: bool) -> Result<Self> {
        if design.num_rows() != table.num_cells() {
            return Err(Error::DimensionMismatch {
                expected: table.num_cells(),
                found: design.num_rows(),
            });
        }
        if table.total() == 0 {
            return Err(Error::EmptyTable);
        }
        let ncell = table.num_cells();
        let order: Vec<usize> =
            if reverse { (0..ncell).rev().collect() } else { (0..ncell).collect() };
        let stat = sufficient_statistic(design, table.binarize().counts())?;
        let x = design.matrix();
        let constraints = Matrix::from_fn(design.dimension(), ncell, |r, c| x[(order[c], r)]);
        let rhs = stat.as_f64();
        Ok(FaceLp { order, constraints, total: rhs[0], rhs })
    }

    /// Maximises the total mass on `cells`; returns the cells (table indices)
    /// with positive mass, restricted to `cells`.
    fn positive_among(&self, cells: &[usize], tol: LpTolerances) -> Result<Vec<usize>> {
        let mut objective = vec![0.0; self.order.len()];
        let mut wanted = vec![false; self.order.len()];
        for &i in cells {
            wanted[i] = true;
        }
        for (v, &cell) in self.order.iter().enumerate() {
            if wanted[cell] {
                objective[v] = 1.0;
            }
        }
        let program = LinearProgram::new(objective, self.constraints.clone(), self.rhs.clone())?;
        let sol = lp::solve_with(&program, tol)?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(Error::UnexpectedLpStatus("infeasible")),
            LpStatus::Unbounded => return Err(Error::UnexpectedLpStatus("unbounded")),
        }
        // the intercept row caps the objective at t'[0]
        if sol.objective_value > self.total + tol.support {
            return Err(Error::NumericalBreakdown("objective exceeds intercept bound"));
        }
        let mut out: Vec<usize> =
            sol.support.iter().map(|&v| self.order[v]).filter(|&c| wanted[c]).collect();
        out.sort_unstable();
        Ok(out)
    }
}

fn face_dimension(design: &DesignMatrix, in_face: &[bool], tol: RankTolerance) -> usize {
    let rows: Vec<usize> = (0..in_face.len()).filter(|&i| in_face[i]).collect();
    linalg::rank(&design.matrix().select_rows(&rows), tol)
}

pub fn find_facial_set_with(
    table: &ContingencyTable,
    design: &DesignMatrix,
    opts: &FacialOptions,
) -> Result<FacialSet> {
    let face_lp = FaceLp::new(table, design, opts.reverse_variable_order)?;
    let mut active = table.zero_cells();
    let mut removed_per_iteration = Vec::new();
    let mut iterations = 0;
    let termination = if active.is_empty() {
        Termination::InitialAEmpty
    } else {
        loop {
            let positive = face_lp.positive_among(&active, opts.lp)?;
            iterations += 1;
            if positive.is_empty() {
                break Termination::OptimalZero;
            }
            active.retain(|i| positive.binary_search(i).is_err());
            removed_per_iteration.push(positive);
            if active.is_empty() {
                break Termination::AllCellsInFace;
            }
        }
    };

    let mut in_face = vec![true; table.num_cells()];
    for &i in &active {
        in_face[i] = false;
    }
    Ok(FacialSet {
        face_dimension: face_dimension(design, &in_face, opts.rank),
        model_dimension: design.dimension(),
        in_face,
        iterations,
        termination,
        removed_per_iteration,
    })
}

/// Independent check: each zero cell gets its own LP maximising its mass.
pub fn per_cell_oracle(table: &ContingencyTable, model: &ModelFormula) -> Result<FacialSet> {
    let opts = FacialOptions::default();
    let design = build_design_with(table, model, opts.rank)?;
    per_cell_oracle_with(table, &design, &opts)
}

pub fn per_cell_oracle_with(
    table: &ContingencyTable,
    design: &DesignMatrix,
    opts: &FacialOptions,
) -> Result<FacialSet> {
    let face_lp = FaceLp::new(table, design, opts.reverse_variable_order)?;
    let zeros = table.zero_cells();
    let mut in_face = vec![true; table.num_cells()];
    for &i in &zeros {
        in_face[i] = !face_lp.positive_among(&[i], opts.lp)?.is_empty();
    }
    let termination = if zeros.is_empty() {
        Termination::InitialAEmpty
    } else if zeros.iter().all(|&i| in_face[i]) {
        Termination::AllCellsInFace
    } else {
        Termination::OptimalZero
    };
    let rescued: Vec<usize> = zeros.iter().copied().filter(|&i| in_face[i]).collect();
    Ok(FacialSet {
        face_dimension: face_dimension(design, &in_face, opts.rank),
        model_dimension: design.dimension(),
        in_face,
        iterations: zeros.len(),
        termination,
        removed_per_iteration: if rescued.is_empty() { Vec::new() } else { vec![rescued] },
    })
}
