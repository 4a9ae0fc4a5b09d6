//! Orchestration behind the `emle` binary: load a table, parse the model,
//! find the facial set, fit, and assemble a [`Report`].

use std::fmt::Write as _;
use std::path::PathBuf;

use emle_core::design::build_design_with;
use emle_core::facial::{find_facial_set_with, per_cell_oracle_with};
use emle_core::fit::fit_with;
use emle_core::{
    parse_formula, parse_generators, ContingencyTable, FacialOptions, FitOptions, LpTolerances, ModelFormula,
    RankTolerance,
};
use thiserror::Error;

use crate::datasets;
use crate::io::{read_table_file, TableError};
use crate::report::{build_report, cell_label, OracleSummary, Report};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    File(PathBuf),
    Builtin(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: DataSource,
    /// Formula (`freq ~ a*b`) or generator (`[ab][c]`, `|ab|c|`) notation.
    pub formula: String,
    pub format: OutputFormat,
    pub facial_only: bool,
    pub dump_design: bool,
    pub oracle_check: bool,
    /// Overrides the LP positivity threshold.
    pub tol_lp: Option<f64>,
    /// Overrides the relative rank threshold.
    pub tol_rank: Option<f64>,
}

impl RunConfig {
    pub fn new(source: DataSource, formula: impl Into<String>) -> Self {
        RunConfig {
            source,
            formula: formula.into(),
            format: OutputFormat::Text,
            facial_only: false,
            dump_design: false,
            oracle_check: false,
            tol_lp: None,
            tol_rank: None,
        }
    }

    fn facial_options(&self) -> FacialOptions {
        let mut lp = LpTolerances::default();
        if let Some(t) = self.tol_lp {
            lp.support = t;
        }
        FacialOptions { lp, rank: self.rank(), reverse_variable_order: false }
    }

    fn rank(&self) -> RankTolerance {
        self.tol_rank.map_or(RankTolerance::Default, RankTolerance::Relative)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("unknown dataset `{0}` (available: haberman, example3x3x3, rochdale)")]
    UnknownDataset(String),
    #[error("table: {0}")]
    Table(TableError),
    #[error("formula: {0}")]
    Formula(emle_core::Error),
    #[error("model: {0}")]
    Model(emle_core::Error),
    #[error("numerical failure: {0}")]
    Numerical(emle_core::Error),
    #[error("oracle check failed: {0} cell(s) differ")]
    OracleMismatch(usize, Box<Report>),
}

impl RunError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io { .. } => 3,
            RunError::Table(_) | RunError::Formula(_) => 4,
            RunError::UnknownDataset(_) | RunError::Model(_) => 5,
            RunError::Numerical(_) => 6,
            RunError::OracleMismatch(..) => 7,
        }
    }
}

fn classify(e: emle_core::Error) -> RunError {
    use emle_core::Error as E;
    match e {
        E::NumericalBreakdown(_)
        | E::UnexpectedLpStatus(_)
        | E::NonConvergence { .. }
        | E::RankDeficientDesign { .. }
        | E::InvalidColumnSelection(_) => RunError::Numerical(e),
        _ => RunError::Model(e),
    }
}

pub fn parse_model(text: &str) -> Result<ModelFormula, RunError> {
    let t = text.trim();
    let parsed = if t.starts_with('[') || t.starts_with('|') { parse_generators(t) } else { parse_formula(t) };
    parsed.map_err(RunError::Formula)
}

pub fn load_table(source: &DataSource, freq_column: &str) -> Result<ContingencyTable, RunError> {
    match source {
        DataSource::File(path) => read_table_file(path, freq_column).map_err(|e| match e {
            TableError::Io(source) => RunError::Io { path: path.clone(), source },
            other => RunError::Table(other),
        }),
        DataSource::Builtin(name) => datasets::builtin(name)
            .ok_or_else(|| RunError::UnknownDataset(name.clone()))?
            .map_err(RunError::Table),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    /// Design matrix as comma-separated text, when requested.
    pub design_dump: Option<String>,
}

pub fn run(config: &RunConfig) -> Result<RunOutput, RunError> {
    let model = parse_model(&config.formula)?;
    let table = load_table(&config.source, model.response())?;
    let fopts = config.facial_options();
    let design = build_design_with(&table, &model, fopts.rank).map_err(classify)?;
    let fs = find_facial_set_with(&table, &design, &fopts).map_err(classify)?;

    let fit = if config.facial_only {
        None
    } else {
        let opts = FitOptions { rank: fopts.rank, ..FitOptions::default() };
        Some(fit_with(&table, &design, &fs, &opts).map_err(classify)?)
    };
    let mut report = build_report(&table, &model, &fs, fit.as_ref());

    if config.oracle_check {
        let oracle = per_cell_oracle_with(&table, &design, &fopts).map_err(classify)?;
        let differing: Vec<String> = (0..table.num_cells())
            .filter(|&i| oracle.in_face[i] != fs.in_face[i])
            .map(|i| cell_label(&table, i))
            .collect();
        let summary = OracleSummary {
            agree: differing.is_empty(),
            search_lp_solves: fs.iterations,
            oracle_lp_solves: oracle.iterations,
            differing_cells: differing,
        };
        let n = summary.differing_cells.len();
        report.oracle = Some(summary);
        if n > 0 {
            return Err(RunError::OracleMismatch(n, Box::new(report)));
        }
    }

    let design_dump = config.dump_design.then(|| {
        let mut s = String::new();
        let mut header: Vec<&str> = table.factors().iter().map(|f| f.name()).collect();
        header.extend(design.labels().iter().map(|l| l.name.as_str()));
        let _ = writeln!(s, "{}", header.join(","));
        for i in 0..table.num_cells() {
            let row: Vec<String> = design.row(i).iter().map(|&x| (x as u8).to_string()).collect();
            let _ = writeln!(s, "{},{}", cell_label(&table, i), row.join(","));
        }
        s
    });
    Ok(RunOutput { report, design_dump })
}

/// Runs the search and the per-cell oracle and reports whether they agree.
pub fn oracle_check(config: &RunConfig) -> Result<OracleSummary, RunError> {
    let cfg = RunConfig { oracle_check: true, facial_only: true, dump_design: false, ..config.clone() };
    match run(&cfg) {
        Ok(out) => Ok(out.report.oracle.expect("oracle requested")),
        Err(RunError::OracleMismatch(_, report)) => Ok(report.oracle.expect("oracle requested")),
        Err(e) => Err(e),
    }
}
