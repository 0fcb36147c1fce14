//! Externally produced embedding vectors (`{"id","vector":[...]}` per line).

use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{read_jsonl, write_jsonl};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingLine {
    pub id: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    ids: Vec<String>,
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

impl EmbeddingSet {
    pub fn new(ids: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if ids.len() != vectors.len() {
            return Err(Error::Schema(format!(
                "{} ids but {} vectors",
                ids.len(),
                vectors.len()
            )));
        }
        let dim = vectors.first().map_or(0, Vec::len);
        for (id, v) in ids.iter().zip(&vectors) {
            if v.len() != dim {
                return Err(Error::Schema(format!(
                    "vector {id:?} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| x.is_nan()) {
                return Err(Error::Validation(format!("vector {id:?} contains NaN")));
            }
        }
        if !vectors.is_empty() && dim == 0 {
            return Err(Error::Schema("zero-dimensional vectors".into()));
        }
        Ok(Self { ids, vectors, dim })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Seeded subsample without replacement, keeping original order.
    /// Sets no larger than `cap` are returned unchanged.
    pub fn subsample(&self, cap: usize, seed: u64) -> Self {
        if self.len() <= cap {
            return self.clone();
        }
        let idx = subsample_indices(self.len(), cap, seed);
        Self {
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
            vectors: idx.iter().map(|&i| self.vectors[i].clone()).collect(),
            dim: self.dim,
        }
    }
}

/// Ascending indices of a seeded `cap`-element sample of `0..n`, or all of
/// `0..n` when `n <= cap`.
pub fn subsample_indices(n: usize, cap: usize, seed: u64) -> Vec<usize> {
    if n <= cap {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, n, cap).into_vec();
    idx.sort_unstable();
    idx
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let lines: Vec<EmbeddingLine> = read_jsonl(path)?;
    let (ids, vectors) = lines.into_iter().map(|l| (l.id, l.vector)).unzip();
    EmbeddingSet::new(ids, vectors)
}

pub fn write_embeddings(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let lines: Vec<EmbeddingLine> = set
        .ids
        .iter()
        .zip(&set.vectors)
        .map(|(id, v)| EmbeddingLine {
            id: id.clone(),
            vector: v.clone(),
        })
        .collect();
    write_jsonl(&lines, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ragged_vectors_rejected() {
        let err = EmbeddingSet::new(vec!["a".into(), "b".into()], vec![vec![1.0, 0.0], vec![1.0]]);
        assert!(matches!(err, Err(Error::Schema(_))));
    }

    #[test]
    fn nan_rejected() {
        assert!(EmbeddingSet::new(vec!["a".into()], vec![vec![f64::NAN]]).is_err());
    }

    #[test]
    fn subsample_is_seeded_and_capped() {
        let n = 50;
        let set = EmbeddingSet::new(
            (0..n).map(|i| i.to_string()).collect(),
            (0..n).map(|i| vec![i as f64]).collect(),
        )
        .unwrap();
        let a = set.subsample(10, 9);
        assert_eq!(a.len(), 10);
        assert_eq!(a, set.subsample(10, 9));
        assert_eq!(set.subsample(100, 9), set);
    }
}
