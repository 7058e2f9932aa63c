//! CSV matrices, weights and labels.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use coot_core::apps::LabelMatrix;
use coot_core::{Histogram, Matrix};

use crate::error::{CliError, CliResult};

/// Headerless comma-separated numbers, one matrix row per line.
pub fn read_matrix(path: &Path) -> CliResult<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path, e))?;
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::io(path, e))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if *cols.get_or_insert(record.len()) != record.len() {
            return Err(CliError::io(
                path,
                format!(
                    "row {} has {} fields, expected {}",
                    line + 1,
                    record.len(),
                    cols.unwrap()
                ),
            ));
        }
        for field in &record {
            let v: f64 = field
                .parse()
                .map_err(|_| CliError::io(path, format!("row {}: {field:?} is not a number", line + 1)))?;
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| CliError::io(path, "no data"))?;
    Ok(Matrix::new(rows, cols, data)?)
}

/// Single-column positive weights, normalized to sum to one.
pub fn read_weights(path: &Path) -> CliResult<Histogram> {
    let m = read_matrix(path)?;
    if m.cols() != 1 {
        return Err(CliError::io(
            path,
            format!("weights need one column, found {}", m.cols()),
        ));
    }
    Ok(Histogram::normalized(m.into_vec())?)
}

/// One integer class per line, `-1` for unlabeled.
pub fn read_labels(path: &Path) -> CliResult<Vec<Option<usize>>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut labels = Vec::new();
    for (line, raw) in text.lines().enumerate() {
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let v: i64 = raw
            .parse()
            .map_err(|_| CliError::io(path, format!("line {}: {raw:?} is not an integer label", line + 1)))?;
        labels.push(match v {
            -1 => None,
            v if v >= 0 => Some(v as usize),
            _ => return Err(CliError::io(path, format!("line {}: labels are -1 or >= 0", line + 1))),
        });
    }
    Ok(labels)
}

/// Builds label matrices over a shared class count.
pub fn label_matrices(sets: &[&[Option<usize>]]) -> CliResult<Vec<LabelMatrix>> {
    let classes = sets.iter().flat_map(|s| s.iter().flatten()).max().map_or(1, |m| m + 1);
    sets.iter()
        .map(|s| Ok(LabelMatrix::new(s.to_vec(), classes)?))
        .collect()
}

/// Full round-trip precision (17 significant digits).
pub fn format_matrix(m: &Matrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 24);
    for row in m.iter_rows() {
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: &Path, m: &Matrix) -> CliResult<()> {
    fs::write(path, format_matrix(m)).map_err(|e| CliError::io(path, e))
}

pub fn write_labels(path: &Path, labels: impl IntoIterator<Item = i64>) -> CliResult<()> {
    let text: String = labels.into_iter().map(|l| format!("{l}\n")).collect();
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
