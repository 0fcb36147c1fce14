use std::fs::File;
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_LEXICONS: &str = include_str!("../../data/lexicons.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitConversion {
    pub keywords: Vec<String>,
    /// A text mentioning both units of a pair counts as one conversion cue.
    pub unit_pairs: Vec<(String, String)>,
}

/// Keyword lists driving feature extraction. Matching is case-insensitive
/// and on whole words; multi-word entries match across any whitespace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lexicons {
    #[serde(default)]
    pub version: u32,
    pub comparisons: Vec<String>,
    pub conditionals: Vec<String>,
    pub unit_conversion: UnitConversion,
    pub operations: Vec<String>,
}

impl Default for Lexicons {
    fn default() -> Self {
        serde_json::from_str(DEFAULT_LEXICONS).expect("bundled lexicon file is valid")
    }
}

impl Lexicons {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_reader(f).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub(crate) fn compile(&self) -> Result<CompiledLexicons> {
        let list = |xs: &[String]| xs.iter().map(|x| phrase_regex(x)).collect::<Result<Vec<_>>>();
        Ok(CompiledLexicons {
            comparisons: list(&self.comparisons)?,
            conditionals: list(&self.conditionals)?,
            conversion_keywords: list(&self.unit_conversion.keywords)?,
            unit_pairs: self
                .unit_conversion
                .unit_pairs
                .iter()
                .map(|(a, b)| Ok((phrase_regex(a)?, phrase_regex(b)?)))
                .collect::<Result<Vec<_>>>()?,
            operations: list(&self.operations)?,
        })
    }
}

fn phrase_regex(phrase: &str) -> Result<Regex> {
    let words: Vec<String> = phrase.split_whitespace().map(regex::escape).collect();
    if words.is_empty() {
        return Err(Error::Config("empty lexicon entry".into()));
    }
    Regex::new(&format!(r"(?i)\b{}\b", words.join(r"\s+")))
        .map_err(|e| Error::Config(format!("lexicon entry {phrase:?}: {e}")))
}

pub(crate) struct CompiledLexicons {
    pub comparisons: Vec<Regex>,
    pub conditionals: Vec<Regex>,
    pub conversion_keywords: Vec<Regex>,
    pub unit_pairs: Vec<(Regex, Regex)>,
    pub operations: Vec<Regex>,
}

/// Total hits of every entry, each counted independently.
pub(crate) fn count_hits(list: &[Regex], text: &str) -> usize {
    list.iter().map(|r| r.find_iter(text).count()).sum()
}
