//! Labelled text datasets (`{"id","text","label"}` per line) and label corruption.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{read_jsonl, write_jsonl};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetLine {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Parallel id/text/label columns. `labels` is `None` for generation datasets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    pub ids: Vec<String>,
    pub texts: Vec<String>,
    pub labels: Option<Vec<String>>,
    pub domain_tag: Option<String>,
}

impl LabeledDataset {
    pub fn new(ids: Vec<String>, texts: Vec<String>, labels: Option<Vec<String>>) -> Result<Self> {
        if ids.len() != texts.len() || labels.as_ref().is_some_and(|l| l.len() != ids.len()) {
            return Err(Error::Schema(format!(
                "parallel lists differ in length: {} ids, {} texts, {} labels",
                ids.len(),
                texts.len(),
                labels.as_ref().map_or(0, Vec::len)
            )));
        }
        Ok(Self {
            ids,
            texts,
            labels,
            domain_tag: None,
        })
    }

    pub fn with_domain(mut self, domain: impl Into<String>) -> Self {
        self.domain_tag = Some(domain.into());
        self
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn is_classification(&self) -> bool {
        self.labels.is_some()
    }

    /// Distinct labels in sorted order.
    pub fn label_set(&self) -> Vec<String> {
        self.labels
            .iter()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn from_lines(lines: Vec<DatasetLine>) -> Result<Self> {
        let labelled = lines.iter().filter(|l| l.label.is_some()).count();
        if labelled != 0 && labelled != lines.len() {
            return Err(Error::Schema(format!(
                "{labelled} of {} lines carry a label; either all or none must",
                lines.len()
            )));
        }
        let mut ids = Vec::with_capacity(lines.len());
        let mut texts = Vec::with_capacity(lines.len());
        let mut labels = Vec::with_capacity(lines.len());
        for l in lines {
            ids.push(l.id);
            texts.push(l.text);
            if let Some(lab) = l.label {
                labels.push(lab);
            }
        }
        let labels = (labelled > 0).then_some(labels);
        Self::new(ids, texts, labels)
    }

    pub fn to_lines(&self) -> Vec<DatasetLine> {
        (0..self.len())
            .map(|i| DatasetLine {
                id: self.ids[i].clone(),
                text: self.texts[i].clone(),
                label: self.labels.as_ref().map(|l| l[i].clone()),
            })
            .collect()
    }

    /// Keeps the given indices, in the order supplied.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            texts: indices.iter().map(|&i| self.texts[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i].clone()).collect()),
            domain_tag: self.domain_tag.clone(),
        }
    }
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    LabeledDataset::from_lines(read_jsonl(path)?)
}

pub fn write_dataset(ds: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    write_jsonl(&ds.to_lines(), path)
}

/// Reassigns `round(fraction * n)` labels, each to a uniformly chosen
/// different label. The input is left untouched.
pub fn corrupt_labels(dataset: &LabeledDataset, fraction: f64, seed: u64) -> Result<LabeledDataset> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Argument(format!("fraction {fraction} outside [0, 1]")));
    }
    let labels = dataset
        .labels
        .as_ref()
        .ok_or_else(|| Error::Schema("dataset has no labels to corrupt".into()))?;
    let n = labels.len();
    let n_flip = (fraction * n as f64).round() as usize;
    if n_flip == 0 {
        return Ok(dataset.clone());
    }
    let classes = dataset.label_set();
    if classes.len() < 2 {
        return Err(Error::Infeasible(format!(
            "cannot relabel with a different class: only {} distinct label(s)",
            classes.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = sample(&mut rng, n, n_flip).into_vec();
    chosen.sort_unstable();

    let mut out = dataset.clone();
    let out_labels = out.labels.as_mut().expect("labels checked above");
    for i in chosen {
        let original = &labels[i];
        let others: Vec<&String> = classes.iter().filter(|c| *c != original).collect();
        let pick = others[rng.random_range(0..others.len())];
        out_labels[i] = pick.clone();
    }
    Ok(out)
}
