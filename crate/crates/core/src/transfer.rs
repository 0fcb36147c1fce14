//! Transfer effects: gains over the baseline row, directional asymmetry,
//! row differences, and the domain × statistics quadrant table.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::matrix::PerformanceMatrix;
use crate::stats::profile::DatasetProfile;

pub const DEFAULT_KS_THRESHOLD: f64 = 0.2;
pub const DEFAULT_TV_THRESHOLD: f64 = 0.2;

/// Fine-tuned accuracy minus baseline accuracy, in percentage points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainMatrix {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Row-major `rows × cols`.
    pub values: Vec<f64>,
    pub baseline_label: String,
    pub baseline: Vec<f64>,
}

impl GainMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.col_labels.len() + col]
    }

    pub fn gain(&self, row: &str, col: &str) -> Option<f64> {
        let r = self.row_labels.iter().position(|x| x == row)?;
        let c = self.col_labels.iter().position(|x| x == col)?;
        Some(self.get(r, c))
    }

    /// Adds the baseline back, giving the fine-tuned rows of the original matrix.
    pub fn restore(&self) -> Vec<f64> {
        let cols = self.col_labels.len();
        self.values
            .iter()
            .enumerate()
            .map(|(i, g)| g + self.baseline[i % cols])
            .collect()
    }

    /// Drops rows for which `keep` returns false.
    pub fn retain_rows(&self, keep: impl Fn(&str) -> bool) -> GainMatrix {
        let cols = self.col_labels.len();
        let mut out = self.clone();
        out.row_labels.clear();
        out.values.clear();
        for (r, label) in self.row_labels.iter().enumerate() {
            if keep(label) {
                out.row_labels.push(label.clone());
                out.values.extend_from_slice(&self.values[r * cols..(r + 1) * cols]);
            }
        }
        out
    }

    pub fn as_matrix(&self) -> PerformanceMatrix {
        PerformanceMatrix::new(self.row_labels.clone(), self.col_labels.clone(), self.values.clone())
            .expect("gain matrix shares a validated shape")
    }
}

pub fn gain_matrix(matrix: &PerformanceMatrix) -> Result<GainMatrix> {
    let base_label = matrix
        .baseline_row()
        .ok_or_else(|| Error::Config("matrix has no baseline row".into()))?;
    let b = matrix.row_index(base_label).expect("baseline validated on construction");
    let baseline = matrix.row(b).to_vec();
    let mut row_labels = Vec::new();
    let mut values = Vec::new();
    for r in (0..matrix.rows()).filter(|&r| r != b) {
        row_labels.push(matrix.row_labels()[r].clone());
        values.extend(matrix.row(r).iter().zip(&baseline).map(|(v, base)| v - base));
    }
    Ok(GainMatrix {
        row_labels,
        col_labels: matrix.col_labels().to_vec(),
        values,
        baseline_label: base_label.to_string(),
        baseline,
    })
}

/// Maps fine-tuning source rows to the evaluation column that stands for
/// the same dataset. `None` marks rows that are not fine-tuning sources
/// (few-shot baselines and the like). Rows absent from the map resolve to
/// the column with the same name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AliasMap(pub BTreeMap<String, Option<String>>);

impl AliasMap {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_reader(f).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn is_source(&self, row: &str) -> bool {
        !matches!(self.0.get(row), Some(None))
    }

    /// Evaluation column for every source row, in row order.
    pub fn resolve(&self, gains: &GainMatrix) -> Result<Vec<(String, String)>> {
        let mut resolved = Vec::new();
        let mut orphans = Vec::new();
        for row in &gains.row_labels {
            let target = match self.0.get(row) {
                Some(None) => continue,
                Some(Some(col)) => col.as_str(),
                None => row.as_str(),
            };
            if gains.col_labels.iter().any(|c| c == target) {
                resolved.push((row.clone(), target.to_string()));
            } else {
                orphans.push(row.clone());
            }
        }
        if !orphans.is_empty() {
            return Err(Error::Config(format!(
                "no evaluation column for source row(s): {}",
                orphans.join(", ")
            )));
        }
        Ok(resolved)
    }
}

/// Transfer between two datasets in both directions.
///
/// `gain_ab` is the model fine-tuned on `a` evaluated on `b`'s task.
/// For one-sided entries `b` is an evaluation column that no source row
/// stands for, and `gain_ba`/`asymmetry` are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTransfer {
    pub a: String,
    pub b: String,
    pub gain_ab: f64,
    pub gain_ba: Option<f64>,
    pub asymmetry: Option<f64>,
}

impl PairTransfer {
    pub fn swapped(&self) -> Option<PairTransfer> {
        let gain_ba = self.gain_ba?;
        Some(PairTransfer {
            a: self.b.clone(),
            b: self.a.clone(),
            gain_ab: gain_ba,
            gain_ba: Some(self.gain_ab),
            asymmetry: Some(gain_ba - self.gain_ab),
        })
    }
}

pub fn asymmetry(gains: &GainMatrix, aliases: &AliasMap) -> Result<Vec<PairTransfer>> {
    let sources = aliases.resolve(gains)?;
    let col = |label: &str| gains.col_labels.iter().position(|c| c == label).expect("resolved");
    let row = |label: &str| gains.row_labels.iter().position(|r| r == label).expect("resolved");

    let mut out = Vec::new();
    for (i, (a, col_a)) in sources.iter().enumerate() {
        for (b, col_b) in &sources[i + 1..] {
            if col_a == col_b {
                continue;
            }
            let gain_ab = gains.get(row(a), col(col_b));
            let gain_ba = gains.get(row(b), col(col_a));
            out.push(PairTransfer {
                a: a.clone(),
                b: b.clone(),
                gain_ab,
                gain_ba: Some(gain_ba),
                asymmetry: Some(gain_ab - gain_ba),
            });
        }
    }

    let covered: BTreeSet<&str> = sources.iter().map(|(_, c)| c.as_str()).collect();
    for (a, col_a) in &sources {
        for target in gains.col_labels.iter().filter(|c| !covered.contains(c.as_str())) {
            if target == col_a {
                continue;
            }
            out.push(PairTransfer {
                a: a.clone(),
                b: target.clone(),
                gain_ab: gains.get(row(a), col(target)),
                gain_ba: None,
                asymmetry: None,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainMatch {
    Same,
    Different,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsMatch {
    Similar,
    Different,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    /// Same domain, similar statistics.
    TraditionalExpectation,
    /// Same domain, different statistics.
    UnexpectedNegative,
    /// Different domain, similar statistics.
    SurprisingPositive,
    /// Different domain, different statistics.
    AsymmetricNegative,
}

impl Quadrant {
    pub fn of(domain: DomainMatch, stats: StatsMatch) -> Self {
        match (domain, stats) {
            (DomainMatch::Same, StatsMatch::Similar) => Quadrant::TraditionalExpectation,
            (DomainMatch::Same, StatsMatch::Different) => Quadrant::UnexpectedNegative,
            (DomainMatch::Different, StatsMatch::Similar) => Quadrant::SurprisingPositive,
            (DomainMatch::Different, StatsMatch::Different) => Quadrant::AsymmetricNegative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantEntry {
    pub source: String,
    pub target: String,
    pub domain_match: DomainMatch,
    pub stats_match: StatsMatch,
    pub quadrant: Quadrant,
    pub length_ks: f64,
    pub class_tv: Option<f64>,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadrantTable {
    pub ks_threshold: f64,
    pub tv_threshold: f64,
    pub entries: Vec<QuadrantEntry>,
}

impl QuadrantTable {
    pub fn entry(&self, source: &str, target: &str) -> Option<&QuadrantEntry> {
        self.entries.iter().find(|e| e.source == source && e.target == target)
    }

    pub fn in_quadrant(&self, q: Quadrant) -> impl Iterator<Item = &QuadrantEntry> {
        self.entries.iter().filter(move |e| e.quadrant == q)
    }
}

/// Places every (source row, target column) cell of `gains` in a quadrant.
///
/// Statistics are similar when the length KS distance is within
/// `ks_threshold` and, if both datasets are classification datasets, the
/// class total variation is within `tv_threshold`.
pub fn categorize_pairs(
    gains: &GainMatrix,
    profiles: &BTreeMap<String, DatasetProfile>,
    domains: &BTreeMap<String, String>,
    ks_threshold: f64,
    tv_threshold: f64,
) -> Result<QuadrantTable> {
    let profile = |l: &str| {
        profiles
            .get(l)
            .ok_or_else(|| Error::Lookup(format!("no dataset profile for {l:?}")))
    };
    let domain = |l: &str| {
        domains
            .get(l)
            .ok_or_else(|| Error::Lookup(format!("no domain for {l:?}")))
    };

    let mut entries = Vec::with_capacity(gains.values.len());
    for (r, source) in gains.row_labels.iter().enumerate() {
        let (sp, sd) = (profile(source)?, domain(source)?);
        for (c, target) in gains.col_labels.iter().enumerate() {
            let (tp, td) = (profile(target)?, domain(target)?);
            let length_ks = sp.length_ks(tp)?;
            let class_tv = sp.class_tv(tp);
            let similar = length_ks <= ks_threshold && class_tv.is_none_or(|tv| tv <= tv_threshold);
            let domain_match = if sd == td { DomainMatch::Same } else { DomainMatch::Different };
            let stats_match = if similar { StatsMatch::Similar } else { StatsMatch::Different };
            entries.push(QuadrantEntry {
                source: source.clone(),
                target: target.clone(),
                domain_match,
                stats_match,
                quadrant: Quadrant::of(domain_match, stats_match),
                length_ks,
                class_tv,
                gain: gains.get(r, c),
            });
        }
    }
    Ok(QuadrantTable {
        ks_threshold,
        tv_threshold,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDelta {
    pub task: String,
    pub delta: f64,
}

/// Per-task `row_a − row_b`.
pub fn row_diff(matrix: &PerformanceMatrix, row_a: &str, row_b: &str) -> Result<Vec<TaskDelta>> {
    let find = |l: &str| {
        matrix
            .row_index(l)
            .ok_or_else(|| Error::Lookup(format!("no row labelled {l:?}")))
    };
    let (a, b) = (find(row_a)?, find(row_b)?);
    Ok(matrix
        .col_labels()
        .iter()
        .zip(matrix.row(a).iter().zip(matrix.row(b)))
        .map(|(task, (x, y))| TaskDelta {
            task: task.clone(),
            delta: x - y,
        })
        .collect())
}
