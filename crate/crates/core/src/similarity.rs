//! Dataset-level similarity from embedding centroids.
//!
//! A dataset is represented by the L2-normalized mean of its embedding
//! vectors; two datasets compare by the cosine of their centroids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::embedding::EmbeddingSet;

/// Upper bound on vectors averaged per dataset.
pub const SAMPLE_CAP: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    Semantic,
    Stylistic,
}

impl std::str::FromStr for SimilarityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "semantic" => Ok(SimilarityKind::Semantic),
            "stylistic" => Ok(SimilarityKind::Stylistic),
            other => Err(Error::Argument(format!("unknown similarity kind {other:?}"))),
        }
    }
}

pub fn centroid(set: &EmbeddingSet) -> Result<Vec<f64>> {
    centroid_named(set, "<unnamed>")
}

fn centroid_named(set: &EmbeddingSet, name: &str) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Err(Error::EmptyInput("embedding set is empty"));
    }
    let mut mean = vec![0.0; set.dim()];
    for v in set.vectors() {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    let n = set.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    let norm = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateEmbedding(name.to_string()));
    }
    mean.iter_mut().for_each(|m| *m /= norm);
    Ok(mean)
}

fn cosine_unit(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0)
}

pub fn dataset_similarity(a: &EmbeddingSet, b: &EmbeddingSet) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Schema(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    Ok(cosine_unit(&centroid(a)?, &centroid(b)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub kind: SimilarityKind,
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl SimilarityMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        Some(self.values[i][j])
    }
}

/// All-pairs centroid cosine. Each unordered pair is computed once, so the
/// result is exactly symmetric.
pub fn similarity_matrix(sets: &[(String, EmbeddingSet)], kind: SimilarityKind) -> Result<SimilarityMatrix> {
    if sets.len() < 2 {
        return Err(Error::Argument(format!("need at least 2 datasets, got {}", sets.len())));
    }
    let dim = sets[0].1.dim();
    if let Some((l, s)) = sets.iter().find(|(_, s)| s.dim() != dim) {
        return Err(Error::Schema(format!(
            "dataset {l:?} has dimension {}, expected {dim}",
            s.dim()
        )));
    }
    let centroids = sets
        .iter()
        .map(|(l, s)| centroid_named(s, l).map_err(|e| match e {
            Error::EmptyInput(_) => Error::Argument(format!("dataset {l:?} has no vectors")),
            other => other,
        }))
        .collect::<Result<Vec<_>>>()?;
    let n = sets.len();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let s = cosine_unit(&centroids[i], &centroids[j]);
            values[i][j] = s;
            values[j][i] = s;
        }
    }
    Ok(SimilarityMatrix {
        kind,
        labels: sets.iter().map(|(l, _)| l.clone()).collect(),
        values,
    })
}
