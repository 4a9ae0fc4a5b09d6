//! Baseline-coded design matrices.
//!
//! Each term contributes one column per combination of non-baseline levels of
//! its factors; the entry for a cell is 1 when the cell carries exactly that
//! level combination on the term's factors. Interaction columns are therefore
//! products of the main-effect indicators, every row is a distinct 0/1 vector,
//! and column 0 (the intercept) is all ones.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::formula::{ModelFormula, Term};
use crate::linalg::{self, Matrix, RankTolerance};
use crate::table::ContingencyTable;
use crate::{Error, Result};

/// Identifies the parameter behind a design column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnLabel {
    pub term: Term,
    /// Level index for each factor of `term`, in the term's (sorted) order.
    /// All are non-baseline, so every entry is at least 1.
    pub levels: Vec<usize>,
    /// Display name such as `(Intercept)` or `a1:c1:g1`.
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    matrix: Matrix,
    labels: Vec<ColumnLabel>,
}

impl DesignMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[ColumnLabel] {
        &self.labels
    }

    /// Number of cells.
    pub fn num_rows(&self) -> usize {
        self.matrix.rows()
    }

    /// Model dimension `d`.
    pub fn dimension(&self) -> usize {
        self.matrix.cols()
    }

    /// The design row `f_i` of cell `i`.
    pub fn row(&self, cell: usize) -> &[f64] {
        self.matrix.row(cell)
    }

    /// Columns belonging to `term`.
    pub fn term_columns(&self, term: &Term) -> Vec<usize> {
        (0..self.labels.len()).filter(|&j| &self.labels[j].term == term).collect()
    }
}

/// `t = Xᵀn`, computed in integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SufficientStatistic {
    pub values: Vec<u64>,
    /// Total of the counts `t` was computed from.
    pub source_total: u64,
}

impl SufficientStatistic {
    pub fn as_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }
}

pub fn build_design(table: &ContingencyTable, model: &ModelFormula) -> Result<DesignMatrix> {
    build_design_with(table, model, RankTolerance::Default)
}

pub fn build_design_with(
    table: &ContingencyTable,
    model: &ModelFormula,
    tol: RankTolerance,
) -> Result<DesignMatrix> {
    let mut labels = Vec::new();
    // (table factor positions, level combination) per column
    let mut specs: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for term in model.terms() {
        let positions = term
            .factors()
            .iter()
            .map(|name| {
                table.factor_position(name).ok_or_else(|| Error::UnknownFactor(name.clone()))
            })
            .collect::<Result<Vec<usize>>>()?;
        let sizes: Vec<usize> = positions.iter().map(|&p| table.factors()[p].num_levels()).collect();
        for levels in non_baseline_combinations(&sizes) {
            let name = if term.is_intercept() {
                String::from("(Intercept)")
            } else {
                let parts: Vec<String> = positions
                    .iter()
                    .zip(&levels)
                    .map(|(&p, &l)| {
                        let f = &table.factors()[p];
                        let mut s = String::from(f.name());
                        s.push_str(&f.levels()[l]);
                        s
                    })
                    .collect();
                parts.join(":")
            };
            labels.push(ColumnLabel { term: term.clone(), levels: levels.clone(), name });
            specs.push((positions.clone(), levels));
        }
    }

    let cells: Vec<_> = table.cells().collect();
    let matrix = Matrix::from_fn(cells.len(), specs.len(), |i, j| {
        let (positions, levels) = &specs[j];
        let hit = positions.iter().zip(levels).all(|(&p, &l)| cells[i].0[p] == l);
        if hit {
            1.0
        } else {
            0.0
        }
    });

    let r = linalg::rank(&matrix, tol);
    if r < matrix.cols() {
        return Err(Error::RankDeficientDesign { rank: r, columns: matrix.cols() });
    }
    Ok(DesignMatrix { matrix, labels })
}

/// All combinations with each coordinate in `1..sizes[k]`, last fastest.
fn non_baseline_combinations(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..s).map(move |l| {
                    let mut p = prefix.clone();
                    p.push(l);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn sufficient_statistic(design: &DesignMatrix, counts: &[u64]) -> Result<SufficientStatistic> {
    if counts.len() != design.num_rows() {
        return Err(Error::DimensionMismatch { expected: design.num_rows(), found: counts.len() });
    }
    let mut values = vec![0u64; design.dimension()];
    for (i, &n) in counts.iter().enumerate() {
        if n == 0 {
            continue;
        }
        for (v, &x) in values.iter_mut().zip(design.row(i)) {
            if x != 0.0 {
                *v += n;
            }
        }
    }
    Ok(SufficientStatistic { values, source_total: counts.iter().sum() })
}
