//! Facial sets and extended maximum likelihood estimation for hierarchical
//! log-linear models on sparse contingency tables.
//!
//! When a table has sampling zeros, the sufficient statistic `t = Xᵀn` may
//! lie on the boundary of the marginal cone generated by the design rows.
//! The ordinary MLE then does not exist, some log-linear parameters are not
//! estimable, and the nominal model dimension overstates the number of free
//! parameters. This crate finds the face of the cone containing `t` in its
//! relative interior (as the set of cells whose design rows span it), fits the
//! model conditional on that face, and reports the corrected dimension,
//! degrees of freedom and information criteria.
//!
//! # Layout
//!
//! - [`table`]: contingency tables, marginals, zero patterns
//! - [`formula`]: model formulas and generator notation, hierarchical closure
//! - [`design`]: baseline-coded 0/1 design matrices and sufficient statistics
//! - [`lp`]: revised simplex solver with Bland's rule
//! - [`facial`]: repeated-LP facial-set search plus a per-cell oracle
//! - [`fit`]: Newton fit of the extended MLE on the facial set
//!
//! The crate is `no_std` and only needs `alloc`. File formats, datasets and
//! the command-line front end live in the `emle` crate.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod design;
pub mod error;
pub mod facial;
pub mod fit;
pub mod formula;
pub mod linalg;
pub mod lp;
pub mod table;

pub use design::{build_design, sufficient_statistic, ColumnLabel, DesignMatrix, SufficientStatistic};
pub use error::Error;
pub use facial::{find_facial_set, mle_exists, per_cell_oracle, FacialOptions, FacialSet, Termination};
pub use fit::{fit, fit_unrestricted, fit_with_columns, FitOptions, FitResult, UnrestrictedFit};
pub use formula::{parse_formula, parse_generators, ModelFormula, Term};
pub use linalg::RankTolerance;
pub use lp::{solve, LinearProgram, LpSolution, LpStatus, LpTolerances};
pub use table::{CellIndex, ContingencyTable, FactorSpec, Marginal};

pub type Result<T, E = Error> = core::result::Result<T, E>;
