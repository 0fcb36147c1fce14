//! The model-variant × task accuracy table and its CSV form.
//!
//! The CSV layout is a header `model,<task1>,...,<taskN>` followed by one row
//! per model variant. Values are accuracy percentages written with two
//! decimals.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row label that marks the un-fine-tuned model when loading from CSV.
pub const DEFAULT_BASELINE_LABEL: &str = "None";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceMatrix {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    /// Row-major, `rows * cols` entries.
    values: Vec<f64>,
    baseline_row: Option<String>,
}

impl PerformanceMatrix {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        check_unique(&row_labels, "row")?;
        check_unique(&col_labels, "column")?;
        if values.len() != row_labels.len() * col_labels.len() {
            return Err(Error::Schema(format!(
                "expected {}x{} = {} values, got {}",
                row_labels.len(),
                col_labels.len(),
                row_labels.len() * col_labels.len(),
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let cols = col_labels.len();
            return Err(Error::Validation(format!(
                "non-finite value at ({}, {})",
                row_labels[pos / cols], col_labels[pos % cols]
            )));
        }
        Ok(Self {
            row_labels,
            col_labels,
            values,
            baseline_row: None,
        })
    }

    /// Builds from nested rows; every inner vector must have `col_labels.len()` entries.
    pub fn from_rows(row_labels: Vec<String>, col_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != col_labels.len()) {
            return Err(Error::Schema(format!(
                "row {i} has {} values, expected {}",
                r.len(),
                col_labels.len()
            )));
        }
        Self::new(row_labels, col_labels, rows.into_iter().flatten().collect())
    }

    /// Designates `label` as the baseline row. Fails if no such row exists.
    pub fn with_baseline(mut self, label: &str) -> Result<Self> {
        if !self.row_labels.iter().any(|r| r == label) {
            return Err(Error::Lookup(format!("baseline row {label:?} not present")));
        }
        self.baseline_row = Some(label.to_string());
        Ok(self)
    }

    pub fn without_baseline(mut self) -> Self {
        self.baseline_row = None;
        self
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn baseline_row(&self) -> Option<&str> {
        self.baseline_row.as_deref()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.cols();
        &self.values[row * c..(row + 1) * c]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows()).map(|r| self.get(r, col)).collect()
    }

    pub fn row_index(&self, label: &str) -> Option<usize> {
        self.row_labels.iter().position(|r| r == label)
    }

    pub fn col_index(&self, label: &str) -> Option<usize> {
        self.col_labels.iter().position(|c| c == label)
    }

    /// Cell lookup by labels.
    pub fn cell(&self, row: &str, col: &str) -> Option<f64> {
        Some(self.get(self.row_index(row)?, self.col_index(col)?))
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = rdr.records();
        let header = match records.next() {
            Some(h) => h.map_err(csv_err)?,
            None => return Err(Error::EmptyInput("matrix csv has no header")),
        };
        if header.len() < 2 {
            return Err(Error::Schema(
                "header needs a row-label column and at least one task".into(),
            ));
        }
        let col_labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        check_unique(&col_labels, "column")?;

        let mut row_labels = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in records.enumerate() {
            let line = i + 2;
            let rec = rec.map_err(csv_err)?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            if rec.len() != header.len() {
                return Err(Error::Parse {
                    line,
                    column: None,
                    message: format!("expected {} fields, found {}", header.len(), rec.len()),
                });
            }
            row_labels.push(rec[0].to_string());
            for (j, cell) in rec.iter().enumerate().skip(1) {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    line,
                    column: Some(j + 1),
                    message: format!("cannot parse {cell:?} as a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        column: Some(j + 1),
                        message: format!("non-finite value {cell:?}"),
                    });
                }
                values.push(v);
            }
        }
        let mut m = Self::new(row_labels, col_labels, values)?;
        if m.row_index(DEFAULT_BASELINE_LABEL).is_some() {
            m.baseline_row = Some(DEFAULT_BASELINE_LABEL.to_string());
        }
        Ok(m)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["model".to_string()];
        header.extend(self.col_labels.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for (r, label) in self.row_labels.iter().enumerate() {
            let mut rec = vec![label.clone()];
            rec.extend(self.row(r).iter().map(|v| format!("{v:.2}")));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Reads a matrix CSV; a row labelled `None` becomes the baseline.
pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<PerformanceMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    PerformanceMatrix::from_csv_reader(file)
}

pub fn write_matrix_csv(matrix: &PerformanceMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    matrix.write_csv(file)
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::Schema(format!("duplicate {what} label {l:?}")));
        }
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(line, e.to_string())
}
