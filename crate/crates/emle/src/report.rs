//! Run reports. [`Report`] is the JSON contract; the text form is rendered
//! from the same struct so both always carry identical numbers.

use std::fmt::Write as _;

use emle_core::{ContingencyTable, FacialSet, FitResult, ModelFormula};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub formula: String,
    pub generators: String,
    pub model_dimension: usize,
    pub status: String,
    pub iterations: usize,
    pub factors: Vec<String>,
    pub face: Vec<FaceRow>,
    pub face_dimension: usize,
    pub facial_set_size: usize,
    pub mle_exists: bool,
    pub total: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRow {
    pub levels: Vec<String>,
    pub count: u64,
    pub in_face: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub maxloglik: f64,
    pub deviance: f64,
    pub residual_df: usize,
    pub bic: f64,
    pub cbic: f64,
    pub iterations: usize,
    pub coefficients: Vec<Coefficient>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub term: String,
    pub estimate: Option<f64>,
    pub std_error: Option<f64>,
    pub aliased: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub agree: bool,
    pub search_lp_solves: usize,
    pub oracle_lp_solves: usize,
    /// Cells (level labels joined by `,`) on which the two methods differ.
    pub differing_cells: Vec<String>,
}

pub fn cell_label(table: &ContingencyTable, cell: usize) -> String {
    let c = table.cell(cell);
    table
        .factors()
        .iter()
        .zip(c.coords())
        .map(|(f, &l)| f.levels()[l].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn build_report(
    table: &ContingencyTable,
    model: &ModelFormula,
    fs: &FacialSet,
    fit: Option<&FitResult>,
) -> Report {
    let face = table
        .cells()
        .enumerate()
        .map(|(i, cell)| FaceRow {
            levels: table
                .factors()
                .iter()
                .zip(cell.coords())
                .map(|(f, &l)| f.levels()[l].clone())
                .collect(),
            count: table.counts()[i],
            in_face: fs.in_face[i],
            fitted: fit.map(|r| r.fitted_means[i]),
        })
        .collect();
    let fit = fit.map(|r| FitSummary {
        maxloglik: r.loglik,
        deviance: r.deviance,
        residual_df: r.residual_df,
        bic: r.bic,
        cbic: r.cbic,
        iterations: r.iterations,
        coefficients: r
            .labels
            .iter()
            .enumerate()
            .map(|(j, label)| Coefficient {
                name: label.name.clone(),
                term: label.term.to_string(),
                estimate: r.coefficients[j],
                std_error: r.std_errors[j],
                aliased: r.coefficients[j].is_none(),
            })
            .collect(),
    });
    Report {
        schema_version: SCHEMA_VERSION,
        formula: model.source().to_owned(),
        generators: model.generator_string(),
        model_dimension: fs.model_dimension,
        status: fs.termination.to_string(),
        iterations: fs.iterations,
        factors: table.factors().iter().map(|f| f.name().to_owned()).collect(),
        face,
        face_dimension: fs.face_dimension,
        facial_set_size: fs.len(),
        mle_exists: emle_core::mle_exists(fs),
        total: table.total(),
        fit,
        oracle: None,
    }
}

/// Seven significant digits, trailing zeros dropped.
pub fn signif(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{x:.6e}");
    }
    let decimals = (6 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_owned(), signif)
}

fn pad_table(rows: &[Vec<String>]) -> String {
    let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncol)
        .map(|k| rows.iter().filter_map(|r| r.get(k)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(k, c)| if k == 0 { format!("{c:<w$}", w = widths[k]) } else { format!("{c:>w$}", w = widths[k]) })
            .collect();
        out.push_str(cells.join(" ").trim_end());
        out.push('\n');
    }
    out
}

/// Human-readable rendering of `report`.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let mut section = |name: &str, body: &str| {
        let _ = write!(out, "${name}\n{body}\n");
    };
    section("formula", &format!("{}\n", report.formula));
    section("model.dimension", &format!("[1] {}\n", report.model_dimension));
    section("status", &format!("[1] \"{}\"\n", report.status));
    section("iterations", &format!("[1] {}\n", report.iterations));

    let mut rows = Vec::with_capacity(report.face.len() + 1);
    let mut header = vec![String::new()];
    header.extend(report.factors.iter().cloned());
    header.push("freq".into());
    header.push("facial_set".into());
    if report.fit.is_some() {
        header.push("fitted".into());
    }
    rows.push(header);
    for (i, r) in report.face.iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(r.levels.iter().cloned());
        row.push(r.count.to_string());
        row.push(u8::from(r.in_face).to_string());
        if let Some(m) = r.fitted {
            row.push(signif(m));
        }
        rows.push(row);
    }
    section("face", &pad_table(&rows));
    section("face.dimension", &format!("[1] {}\n", report.face_dimension));

    if let Some(fit) = &report.fit {
        section("maxloglik", &format!("[1] {}\n", signif(fit.maxloglik)));
        let mut rows = vec![vec![String::new(), "Estimate".into(), "Std. Error".into()]];
        for c in &fit.coefficients {
            let est = if c.aliased { "NA (aliased)".to_owned() } else { opt(c.estimate) };
            rows.push(vec![c.name.clone(), est, if c.aliased { String::new() } else { opt(c.std_error) }]);
        }
        section("coefficients", &pad_table(&rows));
        section("df.residual", &format!("[1] {}\n", fit.residual_df));
        section("deviance", &format!("[1] {}\n", signif(fit.deviance)));
        section("bic", &format!("[1] {}\n", signif(fit.bic)));
        section("cbic", &format!("[1] {}\n", signif(fit.cbic)));
    }
    if let Some(o) = &report.oracle {
        let mut body = format!(
            "[1] \"{}\"  (search LPs: {}, oracle LPs: {})\n",
            if o.agree { "pass" } else { "FAIL" },
            o.search_lp_solves,
            o.oracle_lp_solves
        );
        for c in &o.differing_cells {
            let _ = writeln!(body, "differs at cell {c}");
        }
        section("oracle.check", &body);
    }
    out
}
