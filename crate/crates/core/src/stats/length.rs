//! Text length distributions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LengthUnit {
    /// Unicode scalar values.
    #[serde(rename = "chars")]
    Characters,
    /// Maximal runs of non-whitespace.
    #[serde(rename = "tokens")]
    WhitespaceTokens,
}

impl LengthUnit {
    pub fn measure(self, text: &str) -> u64 {
        match self {
            LengthUnit::Characters => text.chars().count() as u64,
            LengthUnit::WhitespaceTokens => text.split_whitespace().count() as u64,
        }
    }
}

impl std::str::FromStr for LengthUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chars" | "characters" => Ok(LengthUnit::Characters),
            "tokens" | "whitespace_tokens" => Ok(LengthUnit::WhitespaceTokens),
            other => Err(Error::Argument(format!("unknown length unit {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub min: u64,
    pub median: f64,
    pub mean: f64,
    pub max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub p05: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthProfile {
    pub unit: LengthUnit,
    pub samples: Vec<u64>,
    pub summary: LengthSummary,
    pub quantiles: Quantiles,
}

impl LengthProfile {
    pub fn from_samples(unit: LengthUnit, samples: Vec<u64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("no texts to measure"));
        }
        let mut sorted: Vec<f64> = samples.iter().map(|&s| s as f64).collect();
        sorted.sort_by(f64::total_cmp);
        let q = |p| quantile_sorted(&sorted, p);
        let quantiles = Quantiles {
            p05: q(0.05),
            p25: q(0.25),
            p50: q(0.50),
            p75: q(0.75),
            p95: q(0.95),
        };
        let summary = LengthSummary {
            min: *samples.iter().min().expect("non-empty"),
            median: quantiles.p50,
            mean: samples.iter().map(|&s| s as f64).sum::<f64>() / samples.len() as f64,
            max: *samples.iter().max().expect("non-empty"),
        };
        Ok(Self {
            unit,
            samples,
            summary,
            quantiles,
        })
    }

    pub fn median(&self) -> f64 {
        self.summary.median
    }

    pub fn samples_f64(&self) -> Vec<f64> {
        self.samples.iter().map(|&s| s as f64).collect()
    }
}

/// Linear-interpolation quantile of an ascending slice: position `p·(n−1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn length_profile<S: AsRef<str>>(texts: &[S], unit: LengthUnit) -> Result<LengthProfile> {
    LengthProfile::from_samples(unit, texts.iter().map(|t| unit.measure(t.as_ref())).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClassLengths {
    pub profiles: BTreeMap<String, LengthProfile>,
    /// Expected classes that had no texts.
    pub omitted: Vec<String>,
}

/// Partitions texts by label and profiles each partition.
pub fn per_class_length<S: AsRef<str>, L: AsRef<str>>(
    texts: &[S],
    labels: &[L],
    unit: LengthUnit,
) -> Result<PerClassLengths> {
    per_class_length_with_labels(texts, labels, &[] as &[&str], unit)
}

/// Like [`per_class_length`], but every class in `expected` that ends up
/// empty is listed in `omitted`.
pub fn per_class_length_with_labels<S: AsRef<str>, L: AsRef<str>, E: AsRef<str>>(
    texts: &[S],
    labels: &[L],
    expected: &[E],
    unit: LengthUnit,
) -> Result<PerClassLengths> {
    if texts.len() != labels.len() {
        return Err(Error::Schema(format!(
            "{} texts but {} labels",
            texts.len(),
            labels.len()
        )));
    }
    let mut parts: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for (t, l) in texts.iter().zip(labels) {
        parts
            .entry(l.as_ref().to_string())
            .or_default()
            .push(unit.measure(t.as_ref()));
    }
    let omitted = expected
        .iter()
        .map(|e| e.as_ref().to_string())
        .filter(|e| !parts.contains_key(e))
        .collect();
    let profiles = parts
        .into_iter()
        .map(|(l, s)| Ok((l, LengthProfile::from_samples(unit, s)?)))
        .collect::<Result<_>>()?;
    Ok(PerClassLengths { profiles, omitted })
}

/// Where the adapted model's median length falls between the base model's
/// (0) and the training data's (1), clipped to `[-0.5, 1.5]`.
pub fn interpolation_index(base: &LengthProfile, train: &LengthProfile, adapted: &LengthProfile) -> Result<f64> {
    let (b, t, a) = (base.median(), train.median(), adapted.median());
    if b == t {
        return Err(Error::UndefinedIndex { median: b });
    }
    Ok(((a - b) / (t - b)).clamp(-0.5, 1.5))
}
