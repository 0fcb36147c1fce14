//! Per-example evaluation outcomes and their aggregation into a matrix.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::PerformanceMatrix;
use super::{read_jsonl, write_jsonl};
use crate::error::{Error, Result};

/// One scored (model, task, example) triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRecord {
    pub model_id: String,
    pub task_id: String,
    pub example_id: String,
    pub prediction: String,
    pub gold: String,
    pub score: u8,
}

/// A generation awaiting a verdict; `score`, if present, is ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnscoredRecord {
    pub model_id: String,
    pub task_id: String,
    pub example_id: String,
    pub prediction: String,
    pub gold: String,
}

impl UnscoredRecord {
    pub fn scored(self, score: u8) -> EvalRecord {
        EvalRecord {
            model_id: self.model_id,
            task_id: self.task_id,
            example_id: self.example_id,
            prediction: self.prediction,
            gold: self.gold,
            score,
        }
    }
}

/// Checks score range and key uniqueness.
pub fn validate_records(records: &[EvalRecord]) -> Result<()> {
    let mut seen = HashSet::new();
    for r in records {
        if r.score > 1 {
            return Err(Error::Schema(format!(
                "score must be 0 or 1, got {} for ({}, {}, {})",
                r.score, r.model_id, r.task_id, r.example_id
            )));
        }
        if !seen.insert((&r.model_id, &r.task_id, &r.example_id)) {
            return Err(Error::Schema(format!(
                "duplicate record ({}, {}, {})",
                r.model_id, r.task_id, r.example_id
            )));
        }
    }
    Ok(())
}

pub fn load_eval_records(path: impl AsRef<Path>) -> Result<Vec<EvalRecord>> {
    let records: Vec<EvalRecord> = read_jsonl(path)?;
    validate_records(&records)?;
    Ok(records)
}

pub fn write_eval_records(records: &[EvalRecord], path: impl AsRef<Path>) -> Result<()> {
    write_jsonl(records, path)
}

pub fn load_unscored_records(path: impl AsRef<Path>) -> Result<Vec<UnscoredRecord>> {
    read_jsonl(path)
}

/// Averages scores per (model, task) into accuracy percentages.
///
/// Rows and columns are sorted lexicographically. Every model must have
/// records for every task, since the matrix has no missing cells.
pub fn aggregate_records(records: &[EvalRecord]) -> Result<PerformanceMatrix> {
    if records.is_empty() {
        return Err(Error::EmptyInput("no evaluation records"));
    }
    validate_records(records)?;

    // (model, task) -> (correct, total)
    let mut cells: BTreeMap<(&str, &str), (u64, u64)> = BTreeMap::new();
    for r in records {
        let c = cells.entry((&r.model_id, &r.task_id)).or_default();
        c.0 += u64::from(r.score);
        c.1 += 1;
    }
    let models: Vec<String> = records
        .iter()
        .map(|r| r.model_id.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let tasks: Vec<String> = records
        .iter()
        .map(|r| r.task_id.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut values = Vec::with_capacity(models.len() * tasks.len());
    for m in &models {
        for t in &tasks {
            let (correct, total) = cells.get(&(m.as_str(), t.as_str())).ok_or_else(|| {
                Error::Schema(format!("no records for model {m:?} on task {t:?}"))
            })?;
            values.push(100.0 * *correct as f64 / *total as f64);
        }
    }
    PerformanceMatrix::new(models, tasks, values)
}
