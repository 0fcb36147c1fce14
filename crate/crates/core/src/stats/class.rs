//! Class distributions and seeded rebalancing.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassProfile {
    pub counts: BTreeMap<String, usize>,
    pub proportions: BTreeMap<String, f64>,
    /// Shannon entropy divided by `ln(#classes)`; 0 for a single class.
    pub normalized_entropy: f64,
    pub majority_label: String,
    pub majority_ratio: f64,
}

impl ClassProfile {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

pub fn class_profile<L: AsRef<str>>(labels: &[L]) -> Result<ClassProfile> {
    if labels.is_empty() {
        return Err(Error::EmptyInput("no labels"));
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l.as_ref().to_string()).or_default() += 1;
    }
    let n = labels.len() as f64;
    let proportions: BTreeMap<String, f64> = counts
        .iter()
        .map(|(k, &c)| (k.clone(), c as f64 / n))
        .collect();
    let entropy: f64 = proportions.values().map(|&p| -p * p.ln()).sum();
    let normalized_entropy = if counts.len() > 1 {
        (entropy / (counts.len() as f64).ln()).clamp(0.0, 1.0)
    } else {
        0.0
    };
    // first label in sorted order wins ties
    let (majority_label, majority_count) = counts
        .iter()
        .fold((String::new(), 0), |(bl, bc), (l, &c)| {
            if c > bc {
                (l.clone(), c)
            } else {
                (bl, bc)
            }
        });
    Ok(ClassProfile {
        counts,
        proportions,
        normalized_entropy,
        majority_label,
        majority_ratio: majority_count as f64 / n,
    })
}

/// Total-variation distance between two class distributions (labels missing
/// on one side count as probability zero there).
pub fn total_variation(a: &ClassProfile, b: &ClassProfile) -> f64 {
    let mut keys: Vec<&String> = a.proportions.keys().chain(b.proportions.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| {
            let pa = a.proportions.get(k).copied().unwrap_or(0.0);
            let pb = b.proportions.get(k).copied().unwrap_or(0.0);
            (pa - pb).abs()
        })
        .sum::<f64>()
}

/// Parses `label:prop,label:prop,...`.
pub fn parse_target_proportions(spec: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (label, prop) = part
            .rsplit_once(':')
            .ok_or_else(|| Error::Argument(format!("expected label:proportion, got {part:?}")))?;
        let p: f64 = prop
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("bad proportion in {part:?}")))?;
        if out.insert(label.trim().to_string(), p).is_some() {
            return Err(Error::Argument(format!("label {label:?} listed twice")));
        }
    }
    Ok(out)
}

const TARGET_SUM_TOL: f64 = 1e-9;

/// Fills in classes missing from a partial target so the shares sum to one.
///
/// The unassigned mass is split among the unlisted classes in proportion to
/// their observed counts, so `negative:0.5` raises the negative share to one
/// half and keeps the relative mix of the rest.
pub fn complete_targets<L: AsRef<str>>(labels: &[L], partial: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    let listed: f64 = partial.values().sum();
    if listed > 1.0 + TARGET_SUM_TOL {
        return Err(Error::Argument(format!("target proportions sum to {listed}, above 1")));
    }
    let mut rest: BTreeMap<String, usize> = BTreeMap::new();
    for l in labels {
        if !partial.contains_key(l.as_ref()) {
            *rest.entry(l.as_ref().to_string()).or_default() += 1;
        }
    }
    let mut out = partial.clone();
    let remainder = (1.0 - listed).max(0.0);
    let rest_total: usize = rest.values().sum();
    if remainder > TARGET_SUM_TOL && rest_total == 0 {
        return Err(Error::Argument(format!(
            "target proportions sum to {listed} and no other class can take the rest"
        )));
    }
    for (label, count) in rest {
        out.insert(label, remainder * count as f64 / rest_total as f64);
    }
    Ok(out)
}

/// Picks the largest subsample whose class mix matches `targets`.
///
/// Classes absent from `targets` are dropped. The kept count per class is
/// within one example of `target × kept_total`. Selection inside a class is
/// a seeded shuffle, so the plan is reproducible per seed. Returned indices
/// are ascending.
pub fn rebalance_plan<L: AsRef<str>>(labels: &[L], targets: &BTreeMap<String, f64>, seed: u64) -> Result<Vec<usize>> {
    if targets.is_empty() {
        return Err(Error::Argument("no target proportions".into()));
    }
    if let Some((l, p)) = targets.iter().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Argument(format!("target for {l:?} is {p}, outside [0, 1]")));
    }
    let sum: f64 = targets.values().sum();
    if (sum - 1.0).abs() > TARGET_SUM_TOL {
        return Err(Error::Argument(format!("target proportions sum to {sum}, not 1")));
    }

    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(l.as_ref()).or_default().push(i);
    }
    for (label, &p) in targets {
        if p > 0.0 && !by_class.contains_key(label.as_str()) {
            return Err(Error::Infeasible(format!("targeted class {label:?} has no examples")));
        }
    }

    let active: Vec<(&str, f64, usize)> = targets
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|(l, &p)| (l.as_str(), p, by_class[l.as_str()].len()))
        .collect();
    let total = active
        .iter()
        .map(|&(_, p, c)| (c as f64 / p + 1e-9).floor() as usize)
        .min()
        .expect("targets sum to one, so some class is active");

    // largest-remainder apportionment of `total`, capped at class size
    let mut keep: Vec<usize> = active
        .iter()
        .map(|&(_, p, c)| ((p * total as f64).floor() as usize).min(c))
        .collect();
    let mut remaining = total.saturating_sub(keep.iter().sum());
    let mut order: Vec<usize> = (0..active.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = active[a].1 * total as f64 - keep[a] as f64;
        let fb = active[b].1 * total as f64 - keep[b] as f64;
        fb.total_cmp(&fa)
    });
    for &i in &order {
        if remaining == 0 {
            break;
        }
        if keep[i] < active[i].2 {
            keep[i] += 1;
            remaining -= 1;
        }
    }

    if let Some(((label, _, count), _)) = active.iter().zip(&keep).find(|(_, &k)| k == 0) {
        return Err(Error::Infeasible(format!(
            "class {label:?} ({count} examples) is too small to reach its target share"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = Vec::with_capacity(total);
    for (&(label, _, _), &k) in active.iter().zip(&keep) {
        let mut idx = by_class[label].clone();
        idx.shuffle(&mut rng);
        kept.extend_from_slice(&idx[..k]);
    }
    kept.sort_unstable();
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(spec: &[(&str, usize)]) -> Vec<String> {
        spec.iter()
            .flat_map(|(l, n)| std::iter::repeat_n(l.to_string(), *n))
            .collect()
    }

    fn targets(spec: &[(&str, f64)]) -> BTreeMap<String, f64> {
        spec.iter().map(|(l, p)| (l.to_string(), *p)).collect()
    }

    #[test]
    fn flipkart_like_proportions() {
        let p = class_profile(&labels(&[("positive", 812), ("negative", 139), ("neutral", 49)])).unwrap();
        assert_eq!(p.proportions["positive"], 0.812);
        assert_eq!(p.proportions["negative"], 0.139);
        assert_eq!(p.proportions["neutral"], 0.049);
        assert_eq!(p.majority_label, "positive");
        assert_eq!(p.majority_ratio, 0.812);
        assert!((p.proportions.values().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_binary() {
        let p = class_profile(&labels(&[("a", 5), ("b", 5)])).unwrap();
        assert!((p.normalized_entropy - 1.0).abs() < 1e-12);
        assert_eq!(p.majority_ratio, 0.5);
    }

    #[test]
    fn single_class() {
        let p = class_profile(&labels(&[("a", 3)])).unwrap();
        assert_eq!(p.normalized_entropy, 0.0);
        assert_eq!(p.majority_ratio, 1.0);
    }

    #[test]
    fn tv_distance() {
        let a = class_profile(&labels(&[("x", 1), ("y", 1)])).unwrap();
        let b = class_profile(&labels(&[("x", 1)])).unwrap();
        assert!((total_variation(&a, &b) - 0.5).abs() < 1e-15);
        assert_eq!(total_variation(&a, &a), 0.0);
    }

    #[test]
    fn balanced_is_noop() {
        let l = labels(&[("neg", 50), ("pos", 50)]);
        let kept = rebalance_plan(&l, &targets(&[("neg", 0.5), ("pos", 0.5)]), 1).unwrap();
        assert_eq!(kept, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn eighty_twenty_to_half() {
        let l = labels(&[("pos", 80), ("neg", 20)]);
        let kept = rebalance_plan(&l, &targets(&[("neg", 0.5), ("pos", 0.5)]), 3).unwrap();
        let pos = kept.iter().filter(|&&i| l[i] == "pos").count();
        let neg = kept.len() - pos;
        assert_eq!((pos, neg), (20, 20));
        assert_eq!(kept, rebalance_plan(&l, &targets(&[("neg", 0.5), ("pos", 0.5)]), 3).unwrap());
    }

    #[test]
    fn missing_class_named() {
        let l = labels(&[("pos", 10)]);
        match rebalance_plan(&l, &targets(&[("neg", 0.5), ("pos", 0.5)]), 0) {
            Err(Error::Infeasible(msg)) => assert!(msg.contains("neg")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tiny_class_infeasible() {
        // 1 "b" example with a 0.01 share caps the total at 100, but "a"
        // only has 1 example for its 0.99 share: total = 1, so "b" gets 0
        let l = labels(&[("a", 1), ("b", 1)]);
        assert!(matches!(
            rebalance_plan(&l, &targets(&[("a", 0.99), ("b", 0.01)]), 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn bad_targets() {
        let l = labels(&[("a", 2)]);
        assert!(rebalance_plan(&l, &targets(&[("a", 0.7)]), 0).is_err());
        assert!(parse_target_proportions("a=0.5").is_err());
        assert_eq!(
            parse_target_proportions("negative:0.5, positive:0.5").unwrap(),
            targets(&[("negative", 0.5), ("positive", 0.5)])
        );
    }

    #[test]
    fn partial_target_completed_by_observed_mix() {
        let l = labels(&[("pos", 60), ("neu", 20), ("neg", 20)]);
        let t = complete_targets(&l, &targets(&[("neg", 0.5)])).unwrap();
        assert_eq!(t["neg"], 0.5);
        assert!((t["pos"] - 0.375).abs() < 1e-15);
        assert!((t["neu"] - 0.125).abs() < 1e-15);
        assert!(complete_targets(&l, &targets(&[("neg", 0.7), ("pos", 0.7)])).is_err());
    }
}
