use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::features::{MathFeatures, FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::io::conllu::Sentence;

fn check_scores(name: &str, scores: &[u8], n: usize) -> Result<()> {
    if scores.len() != n {
        return Err(Error::Schema(format!("{name} has {} scores, expected {n}", scores.len())));
    }
    if let Some(s) = scores.iter().find(|&&s| s > 1) {
        return Err(Error::Schema(format!("{name} contains non-binary score {s}")));
    }
    Ok(())
}

/// Sample Pearson correlation; `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCorrelation {
    pub feature: String,
    pub correlation: Option<f64>,
}

/// Correlates each feature with `adapter − base` per problem.
pub fn feature_improvement_correlation(
    features: &[MathFeatures],
    base: &[u8],
    adapter: &[u8],
) -> Result<Vec<FeatureCorrelation>> {
    check_scores("base", base, features.len())?;
    check_scores("adapter", adapter, features.len())?;
    let improvement: Vec<f64> = base
        .iter()
        .zip(adapter)
        .map(|(&b, &a)| f64::from(a) - f64::from(b))
        .collect();
    let columns: Vec<[f64; 10]> = features.iter().map(MathFeatures::values).collect();
    Ok(FEATURE_NAMES
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col: Vec<f64> = columns.iter().map(|v| v[j]).collect();
            FeatureCorrelation {
                feature: name.to_string(),
                correlation: pearson(&col, &improvement),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKey {
    Deprel,
    Upos,
    Operation,
}

impl FromStr for FeatureKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deprel" => Ok(FeatureKey::Deprel),
            "upos" => Ok(FeatureKey::Upos),
            "operation" => Ok(FeatureKey::Operation),
            other => Err(Error::Argument(format!("unknown feature key {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub adapter_success_count: usize,
    pub base_success_count: usize,
    /// `adapter / base`; `None` (serialized as null) when base is zero.
    pub ratio: Option<f64>,
    pub defined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRatioTable {
    pub key: FeatureKey,
    pub problems: usize,
    pub rows: BTreeMap<String, ImportanceRow>,
}

/// Tallies, for every key value, how many problems containing it each model
/// solved. A problem counts once per key value however often it occurs.
pub fn importance_table(
    key: FeatureKey,
    problem_keys: &[BTreeSet<String>],
    base: &[u8],
    adapter: &[u8],
) -> Result<ImportanceRatioTable> {
    check_scores("base", base, problem_keys.len())?;
    check_scores("adapter", adapter, problem_keys.len())?;
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for ((keys, &b), &a) in problem_keys.iter().zip(base).zip(adapter) {
        for k in keys {
            let e = counts.entry(k.clone()).or_default();
            e.0 += usize::from(a);
            e.1 += usize::from(b);
        }
    }
    let rows = counts
        .into_iter()
        .map(|(k, (a, b))| {
            let ratio = (b > 0).then(|| a as f64 / b as f64);
            let row = ImportanceRow {
                adapter_success_count: a,
                base_success_count: b,
                ratio,
                defined: ratio.is_some(),
            };
            (k, row)
        })
        .collect();
    Ok(ImportanceRatioTable { key, problems: problem_keys.len(), rows })
}

/// Distinct deprel or UPOS values per problem.
pub fn problem_keys(problems: &[Vec<Sentence>], key: FeatureKey) -> Result<Vec<BTreeSet<String>>> {
    problems
        .iter()
        .map(|sents| {
            sents
                .iter()
                .flat_map(|s| &s.tokens)
                .map(|t| match key {
                    FeatureKey::Deprel => Ok(t.deprel.clone()),
                    FeatureKey::Upos => Ok(t.upos.clone()),
                    FeatureKey::Operation => Err(Error::Argument(
                        "operation keys come from solutions, not parses".into(),
                    )),
                })
                .collect()
        })
        .collect()
}

pub fn relation_importance(
    problems: &[Vec<Sentence>],
    base: &[u8],
    adapter: &[u8],
    key: FeatureKey,
) -> Result<ImportanceRatioTable> {
    importance_table(key, &problem_keys(problems, key)?, base, adapter)
}
