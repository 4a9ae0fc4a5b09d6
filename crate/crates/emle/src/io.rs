//! Delimited-text tables.
//!
//! One row per cell: a column per factor holding the level label, plus a
//! frequency column. Comma-separated input is detected from the header;
//! anything else is split on whitespace. Cells not listed get a count of zero.

use std::collections::HashSet;
use std::io::{Read, Write};

use emle_core::{ContingencyTable, FactorSpec};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("input has no header row")]
    Empty,
    #[error("frequency column `{0}` not found in header")]
    MissingFrequencyColumn(String),
    #[error("no factor columns besides the frequency column")]
    NoFactors,
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("line {line}: negative frequency `{value}`")]
    NegativeFrequency { line: usize, value: String },
    #[error("line {line}: frequency `{value}` is not a nonnegative integer")]
    NonIntegerFrequency { line: usize, value: String },
    #[error("line {line}: cell listed twice")]
    DuplicateCell { line: usize },
    #[error(transparent)]
    Table(#[from] emle_core::Error),
}

struct Row {
    line: usize,
    fields: Vec<String>,
}

fn read_rows(text: &str) -> Result<(Vec<String>, Vec<Row>), TableError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header_line)) = lines.next() else {
        return Err(TableError::Empty);
    };
    if header_line.contains(',') {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            if record.iter().all(str::is_empty) {
                continue;
            }
            rows.push(Row { line, fields: record.iter().map(str::to_owned).collect() });
        }
        Ok((header, rows))
    } else {
        let header = header_line.split_whitespace().map(str::to_owned).collect();
        let rows = lines
            .map(|(k, l)| Row { line: k + 1, fields: l.split_whitespace().map(str::to_owned).collect() })
            .collect();
        Ok((header, rows))
    }
}

fn parse_frequency(line: usize, raw: &str) -> Result<u64, TableError> {
    if let Ok(v) = raw.parse::<u64>() {
        return Ok(v);
    }
    match raw.parse::<f64>() {
        Ok(v) if v < 0.0 => Err(TableError::NegativeFrequency { line, value: raw.to_owned() }),
        _ => Err(TableError::NonIntegerFrequency { line, value: raw.to_owned() }),
    }
}

/// Reads a table whose counts live in `freq_column`; every other column is a
/// factor. Levels keep first-appearance order unless every label of a factor
/// is numeric, in which case they are sorted ascending.
pub fn parse_table<R: Read>(mut source: R, freq_column: &str) -> Result<ContingencyTable, TableError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let (header, rows) = read_rows(&text)?;
    let freq = header
        .iter()
        .position(|h| h == freq_column)
        .ok_or_else(|| TableError::MissingFrequencyColumn(freq_column.to_owned()))?;
    let factor_cols: Vec<usize> = (0..header.len()).filter(|&k| k != freq).collect();
    if factor_cols.is_empty() {
        return Err(TableError::NoFactors);
    }

    let mut levels: Vec<Vec<String>> = vec![Vec::new(); factor_cols.len()];
    let mut parsed = Vec::with_capacity(rows.len());
    for row in &rows {
        if row.fields.len() != header.len() {
            return Err(TableError::Ragged { line: row.line, expected: header.len(), found: row.fields.len() });
        }
        let count = parse_frequency(row.line, &row.fields[freq])?;
        for (k, &c) in factor_cols.iter().enumerate() {
            if !levels[k].contains(&row.fields[c]) {
                levels[k].push(row.fields[c].clone());
            }
        }
        parsed.push((row, count));
    }
    for lv in &mut levels {
        let numeric: Option<Vec<f64>> = lv.iter().map(|l| l.parse::<f64>().ok()).collect();
        if let Some(values) = numeric {
            let mut paired: Vec<(f64, String)> = values.into_iter().zip(lv.drain(..)).collect();
            paired.sort_by(|a, b| a.0.total_cmp(&b.0));
            lv.extend(paired.into_iter().map(|(_, l)| l));
        }
    }

    let factors = factor_cols
        .iter()
        .zip(levels)
        .map(|(&c, lv)| FactorSpec::new(header[c].clone(), lv))
        .collect::<Result<Vec<_>, _>>()?;
    let ncell: usize = factors.iter().map(FactorSpec::num_levels).product();
    let mut counts = vec![0u64; ncell];
    let mut seen = HashSet::new();
    for (row, count) in parsed {
        let mut index = 0;
        for (f, &c) in factors.iter().zip(&factor_cols) {
            let level = f.level_index(&row.fields[c]).expect("level collected above");
            index = index * f.num_levels() + level;
        }
        if !seen.insert(index) {
            return Err(TableError::DuplicateCell { line: row.line });
        }
        counts[index] = count;
    }
    Ok(ContingencyTable::new(factors, counts)?)
}

pub fn read_table_file(path: &std::path::Path, freq_column: &str) -> Result<ContingencyTable, TableError> {
    parse_table(std::fs::File::open(path)?, freq_column)
}

/// Writes every cell, in table order, as comma-separated text.
pub fn write_table<W: Write>(table: &ContingencyTable, freq_column: &str, sink: W) -> Result<(), TableError> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<&str> = table.factors().iter().map(FactorSpec::name).collect();
    header.push(freq_column);
    w.write_record(&header)?;
    for (i, cell) in table.cells().enumerate() {
        let mut record: Vec<String> = table
            .factors()
            .iter()
            .zip(cell.coords())
            .map(|(f, &l)| f.levels()[l].clone())
            .collect();
        record.push(table.counts()[i].to_string());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}
