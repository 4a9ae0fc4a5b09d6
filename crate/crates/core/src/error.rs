use alloc::string::String;
use core::fmt;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A factor was declared with fewer than two levels.
    TooFewLevels { factor: String },
    DuplicateLevel { factor: String, level: String },
    DuplicateFactor(String),
    /// Count vector length does not match the product of the level counts.
    CellCountMismatch { expected: usize, found: usize },
    InvalidCell,
    UnknownFactor(String),
    /// Formula or generator text could not be parsed.
    Syntax { position: usize, message: String },
    EmptyModel,
    RepeatedFactor(String),
    /// The baseline-coded design lost rank; this points at a coding bug.
    RankDeficientDesign { rank: usize, columns: usize },
    DimensionMismatch { expected: usize, found: usize },
    /// The simplex method failed to make progress within its pivot budget.
    NumericalBreakdown(&'static str),
    /// An LP that is feasible by construction came back infeasible or unbounded.
    UnexpectedLpStatus(&'static str),
    EmptyTable,
    /// The facial set does not belong to this table (a positive cell is off the face).
    InconsistentFacialSet,
    InvalidColumnSelection(&'static str),
    NonConvergence { iterations: usize, gradient: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::TooFewLevels { factor } => {
                write!(f, "factor `{factor}` needs at least two levels")
            }
            Error::DuplicateLevel { factor, level } => {
                write!(f, "factor `{factor}` lists level `{level}` twice")
            }
            Error::DuplicateFactor(name) => write!(f, "factor `{name}` declared twice"),
            Error::CellCountMismatch { expected, found } => {
                write!(f, "expected {expected} cell counts, found {found}")
            }
            Error::InvalidCell => f.write_str("cell coordinates out of range"),
            Error::UnknownFactor(name) => write!(f, "unknown factor `{name}`"),
            Error::Syntax { position, message } => {
                write!(f, "syntax error at offset {position}: {message}")
            }
            Error::EmptyModel => f.write_str("model has no terms"),
            Error::RepeatedFactor(name) => {
                write!(f, "factor `{name}` appears twice in one term")
            }
            Error::RankDeficientDesign { rank, columns } => {
                write!(f, "design matrix has rank {rank} but {columns} columns")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NumericalBreakdown(what) => write!(f, "numerical breakdown: {what}"),
            Error::UnexpectedLpStatus(what) => write!(f, "unexpected LP status: {what}"),
            Error::EmptyTable => f.write_str("table has no positive counts"),
            Error::InconsistentFacialSet => {
                f.write_str("facial set excludes a cell with a positive count")
            }
            Error::InvalidColumnSelection(why) => write!(f, "invalid column selection: {why}"),
            Error::NonConvergence { iterations, gradient } => write!(
                f,
                "fit did not converge after {iterations} iterations (gradient {gradient:e})"
            ),
        }
    }
}

impl core::error::Error for Error {}
