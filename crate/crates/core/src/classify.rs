//! Confusion matrices, prediction-bias metrics and outcome-conditioned
//! length profiles for classification tasks.
//!
//! Generated answers are matched to the label set after trimming,
//! lowercasing and stripping trailing punctuation. Anything that still does
//! not match lands in a dedicated `unparseable` column instead of being
//! forced into a class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::length::{LengthProfile, LengthUnit};

/// Normalizes a generated or gold label for matching.
pub fn normalize_label(s: &str) -> String {
    s.trim()
        .to_lowercase()
        .trim_end_matches(|c: char| c.is_ascii_punctuation())
        .trim_end()
        .to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    /// `counts[gold][predicted]`; the last column counts unparseable predictions.
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn unparseable_column(&self) -> usize {
        self.labels.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn gold_total(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn predicted_total(&self, class: usize) -> u64 {
        self.counts.iter().map(|r| r[class]).sum()
    }

    pub fn unparseable(&self) -> u64 {
        self.predicted_total(self.unparseable_column())
    }

    /// Each row divided by its gold total (rows with no records stay zero).
    pub fn row_normalized(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|row| {
                let t: u64 = row.iter().sum();
                row.iter()
                    .map(|&c| if t == 0 { 0.0 } else { c as f64 / t as f64 })
                    .collect()
            })
            .collect()
    }
}

/// Index of `s` in `label_set` after normalization.
fn match_label(normalized_set: &[String], s: &str) -> Option<usize> {
    let n = normalize_label(s);
    normalized_set.iter().position(|l| *l == n)
}

fn normalized_set<L: AsRef<str>>(label_set: &[L]) -> Result<Vec<String>> {
    let set: Vec<String> = label_set.iter().map(|l| normalize_label(l.as_ref())).collect();
    for (i, l) in set.iter().enumerate() {
        if set[..i].contains(l) {
            return Err(Error::Schema(format!("label {l:?} appears twice after normalization")));
        }
    }
    Ok(set)
}

/// Builds the matrix from `(prediction, gold)` pairs.
pub fn confusion_matrix<P, G, L>(pairs: &[(P, G)], label_set: &[L]) -> Result<ConfusionMatrix>
where
    P: AsRef<str>,
    G: AsRef<str>,
    L: AsRef<str>,
{
    if label_set.is_empty() {
        return Err(Error::Argument("empty label set".into()));
    }
    let set = normalized_set(label_set)?;
    let k = set.len();
    let mut counts = vec![vec![0u64; k + 1]; k];
    for (pred, gold) in pairs {
        let g = match_label(&set, gold.as_ref()).ok_or_else(|| {
            Error::Schema(format!("gold label {:?} is not in the label set", gold.as_ref()))
        })?;
        let p = match_label(&set, pred.as_ref()).unwrap_or(k);
        counts[g][p] += 1;
    }
    Ok(ConfusionMatrix {
        labels: label_set.iter().map(|l| l.as_ref().to_string()).collect(),
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassBias {
    pub label: String,
    /// `None` when the class was never predicted.
    pub precision: Option<f64>,
    /// `None` when the class never occurs in gold.
    pub recall: Option<f64>,
    pub gold_rate: f64,
    pub predicted_rate: f64,
    /// `predicted_rate − gold_rate`.
    pub skew: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasMetrics {
    pub classes: Vec<ClassBias>,
    pub unparseable_rate: f64,
}

pub fn bias_metrics(cm: &ConfusionMatrix) -> BiasMetrics {
    let total = cm.total();
    let rate = |x: u64| if total == 0 { 0.0 } else { x as f64 / total as f64 };
    let classes = cm
        .labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let tp = cm.counts[i][i];
            let predicted = cm.predicted_total(i);
            let gold = cm.gold_total(i);
            let gold_rate = rate(gold);
            let predicted_rate = rate(predicted);
            ClassBias {
                label: label.clone(),
                precision: (predicted > 0).then(|| tp as f64 / predicted as f64),
                recall: (gold > 0).then(|| tp as f64 / gold as f64),
                gold_rate,
                predicted_rate,
                skew: predicted_rate - gold_rate,
            }
        })
        .collect();
    BiasMetrics {
        classes,
        unparseable_rate: rate(cm.unparseable()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeBucket {
    pub count: usize,
    /// `None` when the bucket is empty.
    pub profile: Option<LengthProfile>,
}

impl OutcomeBucket {
    fn from_samples(unit: LengthUnit, samples: Vec<u64>) -> Result<Self> {
        let count = samples.len();
        let profile = if count == 0 {
            None
        } else {
            Some(LengthProfile::from_samples(unit, samples)?)
        };
        Ok(Self { count, profile })
    }

    pub fn samples(&self) -> &[u64] {
        self.profile.as_ref().map_or(&[], |p| &p.samples)
    }
}

/// Input lengths split by binary outcome.
///
/// A prediction counts as positive only when it normalizes to the positive
/// label; everything else, including unparseable output, is a negative
/// prediction. `unparseable` reports how many of those there were.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeLengths {
    pub positive_label: String,
    pub true_pos: OutcomeBucket,
    pub false_pos: OutcomeBucket,
    pub false_neg: OutcomeBucket,
    pub true_neg: OutcomeBucket,
    pub unparseable: usize,
}

impl OutcomeLengths {
    pub fn total(&self) -> usize {
        self.true_pos.count + self.false_pos.count + self.false_neg.count + self.true_neg.count
    }
}

pub fn outcome_conditioned_lengths<P, G, T, L>(
    pairs: &[(P, G)],
    texts: &[T],
    label_set: &[L],
    positive_label: &str,
    unit: LengthUnit,
) -> Result<OutcomeLengths>
where
    P: AsRef<str>,
    G: AsRef<str>,
    T: AsRef<str>,
    L: AsRef<str>,
{
    if label_set.len() != 2 {
        return Err(Error::Unsupported(format!(
            "outcome buckets need a binary label set, got {} labels",
            label_set.len()
        )));
    }
    if pairs.len() != texts.len() {
        return Err(Error::Schema(format!("{} records but {} texts", pairs.len(), texts.len())));
    }
    let set = normalized_set(label_set)?;
    let pos = match_label(&set, positive_label)
        .ok_or_else(|| Error::Argument(format!("{positive_label:?} is not in the label set")))?;

    let mut buckets: [Vec<u64>; 4] = Default::default();
    let mut unparseable = 0;
    for ((pred, gold), text) in pairs.iter().zip(texts) {
        let g = match_label(&set, gold.as_ref()).ok_or_else(|| {
            Error::Schema(format!("gold label {:?} is not in the label set", gold.as_ref()))
        })?;
        let p = match_label(&set, pred.as_ref());
        if p.is_none() {
            unparseable += 1;
        }
        let (gold_pos, pred_pos) = (g == pos, p == Some(pos));
        let slot = match (gold_pos, pred_pos) {
            (true, true) => 0,
            (false, true) => 1,
            (true, false) => 2,
            (false, false) => 3,
        };
        buckets[slot].push(unit.measure(text.as_ref()));
    }
    let [tp, fp, fneg, tn] = buckets;
    Ok(OutcomeLengths {
        positive_label: label_set[pos].as_ref().to_string(),
        true_pos: OutcomeBucket::from_samples(unit, tp)?,
        false_pos: OutcomeBucket::from_samples(unit, fp)?,
        false_neg: OutcomeBucket::from_samples(unit, fneg)?,
        true_neg: OutcomeBucket::from_samples(unit, tn)?,
        unparseable,
    })
}
