//! Contingency tables over the full cross-classification of named factors.
//!
//! Cells are stored in lexicographic order of their level indices, in factor
//! order, with the last factor varying fastest. Every row index of a design
//! matrix refers to this ordering.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// A classification criterion and its ordered levels. The first level is the
/// baseline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSpec {
    name: String,
    levels: Vec<String>,
}

impl FactorSpec {
    pub fn new<N, L, S>(name: N, levels: L) -> Result<Self>
    where
        N: Into<String>,
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let levels: Vec<String> = levels.into_iter().map(Into::into).collect();
        if levels.len() < 2 {
            return Err(Error::TooFewLevels { factor: name });
        }
        for (i, level) in levels.iter().enumerate() {
            if levels[..i].contains(level) {
                return Err(Error::DuplicateLevel { factor: name, level: level.clone() });
            }
        }
        Ok(FactorSpec { name, levels })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == label)
    }
}

/// One level index per factor, in factor order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellIndex(pub Vec<usize>);

impl CellIndex {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

/// Renders a cell the way the literature abbreviates it: one-based level
/// indices run together, e.g. `131`. Levels past 9 are dot-separated.
impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.0.iter().any(|&c| c >= 9);
        for (k, c) in self.0.iter().enumerate() {
            if wide && k > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", c + 1)?;
        }
        Ok(())
    }
}

/// Counts over a subset of factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marginal {
    /// Positions (in the parent table) of the factors kept, ascending.
    pub factors: Vec<usize>,
    /// One count per marginal cell, last kept factor fastest.
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    factors: Vec<FactorSpec>,
    counts: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn new(factors: Vec<FactorSpec>, counts: Vec<u64>) -> Result<Self> {
        for (i, f) in factors.iter().enumerate() {
            if factors[..i].iter().any(|g| g.name == f.name) {
                return Err(Error::DuplicateFactor(f.name.clone()));
            }
        }
        let expected = factors.iter().map(FactorSpec::num_levels).product::<usize>();
        if counts.len() != expected {
            return Err(Error::CellCountMismatch { expected, found: counts.len() });
        }
        let total = counts.iter().sum();
        Ok(ContingencyTable { factors, counts, total })
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    pub fn factor_position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.name == name)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Grand total `N`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn num_cells(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, cell: &CellIndex) -> Result<u64> {
        Ok(self.counts[self.linear_index(cell)?])
    }

    /// Cells with a zero count, as linear indices.
    pub fn zero_cells(&self) -> Vec<usize> {
        (0..self.counts.len()).filter(|&i| self.counts[i] == 0).collect()
    }

    pub fn cell(&self, index: usize) -> CellIndex {
        let mut coords = vec![0; self.factors.len()];
        let mut rest = index;
        for (k, f) in self.factors.iter().enumerate().rev() {
            coords[k] = rest % f.num_levels();
            rest /= f.num_levels();
        }
        CellIndex(coords)
    }

    pub fn linear_index(&self, cell: &CellIndex) -> Result<usize> {
        if cell.0.len() != self.factors.len() {
            return Err(Error::InvalidCell);
        }
        let mut index = 0;
        for (f, &c) in self.factors.iter().zip(&cell.0) {
            if c >= f.num_levels() {
                return Err(Error::InvalidCell);
            }
            index = index * f.num_levels() + c;
        }
        Ok(index)
    }

    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.num_cells()).map(move |i| self.cell(i))
    }

    /// Marginal counts over the named factors. The result is laid out in the
    /// table's factor order regardless of the order of `subset`.
    pub fn marginal<S: AsRef<str>>(&self, subset: &[S]) -> Result<Marginal> {
        let mut keep = Vec::with_capacity(subset.len());
        for name in subset {
            let name = name.as_ref();
            let pos = self
                .factor_position(name)
                .ok_or_else(|| Error::UnknownFactor(String::from(name)))?;
            if !keep.contains(&pos) {
                keep.push(pos);
            }
        }
        keep.sort_unstable();
        let size = keep.iter().map(|&k| self.factors[k].num_levels()).product::<usize>();
        let mut counts = vec![0u64; size];
        for (i, &n) in self.counts.iter().enumerate() {
            let cell = self.cell(i);
            let mut m = 0;
            for &k in &keep {
                m = m * self.factors[k].num_levels() + cell.0[k];
            }
            counts[m] += n;
        }
        Ok(Marginal { factors: keep, counts })
    }

    /// Indicator of positive counts. Only the zero pattern matters for the
    /// facial set, so this is the statistic the LP search works with.
    pub fn binarize(&self) -> ContingencyTable {
        let counts: Vec<u64> = self.counts.iter().map(|&n| u64::from(n > 0)).collect();
        let total = counts.iter().sum();
        ContingencyTable { factors: self.factors.clone(), counts, total }
    }

    pub fn with_counts(&self, counts: Vec<u64>) -> Result<ContingencyTable> {
        ContingencyTable::new(self.factors.clone(), counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haberman() -> ContingencyTable {
        let f = |n: &str| FactorSpec::new(n, ["0", "1"]).unwrap();
        ContingencyTable::new(vec![f("a"), f("b"), f("c")], vec![0, 1, 2, 1, 4, 1, 3, 0]).unwrap()
    }

    #[test]
    fn last_factor_varies_fastest() {
        let t = haberman();
        assert_eq!(t.cell(1), CellIndex(vec![0, 0, 1]));
        assert_eq!(t.cell(4), CellIndex(vec![1, 0, 0]));
        assert_eq!(t.linear_index(&CellIndex(vec![1, 1, 0])).unwrap(), 6);
        assert_eq!(t.count(&CellIndex(vec![1, 0, 0])).unwrap(), 4);
        assert_eq!(t.total(), 12);
        assert_eq!(t.zero_cells(), vec![0, 7]);
    }

    #[test]
    fn marginals() {
        let t = haberman();
        assert_eq!(t.marginal(&["a"]).unwrap().counts, vec![4, 8]);
        assert_eq!(t.marginal(&["c", "a", "b"]).unwrap().counts, t.counts());
        assert_eq!(t.marginal::<&str>(&[]).unwrap().counts, vec![12]);
        assert_eq!(t.marginal(&["b", "a"]).unwrap().factors, vec![0, 1]);
        assert_eq!(t.marginal(&["z"]), Err(Error::UnknownFactor("z".into())));
    }

    #[test]
    fn binarize_cases() {
        let t = haberman();
        let b = t.binarize();
        assert_eq!(b.counts(), &[0, 1, 1, 1, 1, 1, 1, 0]);
        assert_eq!(b.total(), 6);
        assert_eq!(b.binarize(), b);
        let zero = t.with_counts(vec![0; 8]).unwrap();
        assert_eq!(zero.binarize(), zero);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(FactorSpec::new("a", ["x"]), Err(Error::TooFewLevels { .. })));
        assert!(matches!(FactorSpec::new("a", ["x", "x"]), Err(Error::DuplicateLevel { .. })));
        let f = FactorSpec::new("a", ["0", "1"]).unwrap();
        assert!(matches!(
            ContingencyTable::new(vec![f.clone()], vec![1, 2, 3]),
            Err(Error::CellCountMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(
            ContingencyTable::new(vec![f.clone(), f], vec![0; 4]),
            Err(Error::DuplicateFactor(_))
        ));
    }

    #[test]
    fn cell_display() {
        assert_eq!(alloc::format!("{}", CellIndex(vec![0, 2, 0])), "131");
    }
}
