//! Whole-dataset statistics, the unit compared when categorizing transfer pairs.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::class::{class_profile, total_variation, ClassProfile};
use super::ks::ks_distance;
use super::length::{length_profile, per_class_length, LengthProfile, LengthUnit};
use crate::error::{Error, Result};
use crate::io::dataset::LabeledDataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub name: String,
    pub domain: Option<String>,
    pub size: usize,
    pub chars: LengthProfile,
    pub tokens: LengthProfile,
    /// Present for classification datasets only.
    pub classes: Option<ClassProfile>,
    /// Per-label profiles in `length_unit`; empty for generation datasets.
    pub per_class: BTreeMap<String, LengthProfile>,
    /// Unit used for `per_class` and for KS comparisons.
    pub length_unit: LengthUnit,
}

impl DatasetProfile {
    pub fn lengths(&self, unit: LengthUnit) -> &LengthProfile {
        match unit {
            LengthUnit::Characters => &self.chars,
            LengthUnit::WhitespaceTokens => &self.tokens,
        }
    }

    /// KS distance between the two datasets' length distributions in this
    /// profile's unit.
    pub fn length_ks(&self, other: &DatasetProfile) -> Result<f64> {
        let unit = self.length_unit;
        ks_distance(&self.lengths(unit).samples_f64(), &other.lengths(unit).samples_f64())
    }

    /// Class total variation, or `None` unless both are classification datasets.
    pub fn class_tv(&self, other: &DatasetProfile) -> Option<f64> {
        Some(total_variation(self.classes.as_ref()?, other.classes.as_ref()?))
    }
}

pub fn profile_dataset(name: &str, ds: &LabeledDataset, unit: LengthUnit) -> Result<DatasetProfile> {
    if ds.is_empty() {
        return Err(Error::EmptyInput("dataset has no examples"));
    }
    let (classes, per_class) = match &ds.labels {
        Some(labels) => (
            Some(class_profile(labels)?),
            per_class_length(&ds.texts, labels, unit)?.profiles,
        ),
        None => (None, BTreeMap::new()),
    };
    Ok(DatasetProfile {
        name: name.to_string(),
        domain: ds.domain_tag.clone(),
        size: ds.len(),
        chars: length_profile(&ds.texts, LengthUnit::Characters)?,
        tokens: length_profile(&ds.texts, LengthUnit::WhitespaceTokens)?,
        classes,
        per_class,
        length_unit: unit,
    })
}

/// Loads every `*.json` profile in `dir`, keyed by the profile's `name`.
pub fn load_profiles_dir(dir: impl AsRef<Path>) -> Result<BTreeMap<String, DatasetProfile>> {
    let dir = dir.as_ref();
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for p in paths {
        let f = File::open(&p).map_err(|e| Error::io(&p, e))?;
        let prof: DatasetProfile = serde_json::from_reader(f)
            .map_err(|e| Error::Schema(format!("{}: {e}", p.display())))?;
        if out.contains_key(&prof.name) {
            return Err(Error::Schema(format!("duplicate profile name {:?}", prof.name)));
        }
        out.insert(prof.name.clone(), prof);
    }
    Ok(out)
}
