use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::lexicon::{count_hits, CompiledLexicons, Lexicons};
use crate::error::Result;

/// Integers or decimals, optionally with comma thousands separators.
pub const NUMBER_PATTERN: &str = r"\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?";

static NUMBER: LazyLock<Regex> = LazyLock::new(|| Regex::new(NUMBER_PATTERN).unwrap());
static SENTENCE_END: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[.?!]+(?:\s+|$)").unwrap());

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MathFeatures {
    pub num_values: usize,
    pub num_questions: usize,
    pub num_entities: usize,
    pub has_comparison: bool,
    pub has_unit_conversion: bool,
    pub num_sentences: usize,
    pub num_operations: usize,
    pub num_comparisons: usize,
    pub num_conditionals: usize,
    pub step_count: usize,
}

/// Names of the numeric features, in the order [`MathFeatures::values`] emits them.
pub const FEATURE_NAMES: [&str; 10] = [
    "num_values",
    "num_questions",
    "num_entities",
    "has_comparison",
    "has_unit_conversion",
    "num_sentences",
    "num_operations",
    "num_comparisons",
    "num_conditionals",
    "step_count",
];

impl MathFeatures {
    /// Feature values as reals, booleans mapped to 0/1.
    pub fn values(&self) -> [f64; 10] {
        [
            self.num_values as f64,
            self.num_questions as f64,
            self.num_entities as f64,
            f64::from(u8::from(self.has_comparison)),
            f64::from(u8::from(self.has_unit_conversion)),
            self.num_sentences as f64,
            self.num_operations as f64,
            self.num_comparisons as f64,
            self.num_conditionals as f64,
            self.step_count as f64,
        ]
    }
}

pub fn step_count(f: &MathFeatures) -> usize {
    f.num_questions + f.num_sentences + f.num_operations + f.num_comparisons + f.num_conditionals
}

/// Splits on runs of `.?!` followed by whitespace or end of text.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    for m in SENTENCE_END.find_iter(text) {
        let s = text[start..m.end()].trim();
        if !s.is_empty() {
            out.push(s);
        }
        start = m.end();
    }
    let rest = text[start..].trim();
    if !rest.is_empty() {
        out.push(rest);
    }
    out
}

fn entities(sentences: &[&str]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for s in sentences {
        for tok in s.split_whitespace().skip(1) {
            let word = tok.trim_matches(|c: char| !c.is_alphanumeric());
            if word.chars().next().is_some_and(char::is_uppercase) {
                out.insert(word.to_string());
            }
        }
    }
    out
}

/// Feature extractor with the lexicons compiled once.
pub struct FeatureExtractor {
    lex: CompiledLexicons,
}

impl FeatureExtractor {
    pub fn new(lexicons: &Lexicons) -> Result<Self> {
        Ok(Self { lex: lexicons.compile()? })
    }

    pub fn extract(&self, text: &str) -> MathFeatures {
        let sentences = split_sentences(text);
        let num_comparisons = count_hits(&self.lex.comparisons, text);
        let conversions = count_hits(&self.lex.conversion_keywords, text)
            + self
                .lex
                .unit_pairs
                .iter()
                .filter(|(a, b)| a.is_match(text) && b.is_match(text))
                .count();
        let mut f = MathFeatures {
            num_values: NUMBER.find_iter(text).count(),
            num_questions: sentences.iter().filter(|s| s.ends_with('?')).count(),
            num_entities: entities(&sentences).len(),
            has_comparison: num_comparisons > 0,
            has_unit_conversion: conversions > 0,
            num_sentences: sentences.len(),
            num_operations: count_hits(&self.lex.operations, text),
            num_comparisons,
            num_conditionals: count_hits(&self.lex.conditionals, text),
            step_count: 0,
        };
        f.step_count = step_count(&f);
        f
    }
}

pub fn extract_math_features(text: &str, lexicons: &Lexicons) -> Result<MathFeatures> {
    Ok(FeatureExtractor::new(lexicons)?.extract(text))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Add,
    Sub,
    Mul,
    Div,
}

impl Operation {
    pub fn as_str(self) -> &'static str {
        match self {
            Operation::Add => "add",
            Operation::Sub => "sub",
            Operation::Mul => "mul",
            Operation::Div => "div",
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            '+' => Some(Operation::Add),
            '-' | '−' => Some(Operation::Sub),
            '*' | '×' => Some(Operation::Mul),
            '/' | '÷' => Some(Operation::Div),
            _ => None,
        }
    }
}

/// Arithmetic operators used infix between operands, as in `<<3+2=5>>` or
/// `12 / 4`. A sign with no operand on its left (`-3`) is not an operation.
pub fn operation_tags(solution: &str) -> BTreeSet<Operation> {
    let chars: Vec<char> = solution.chars().collect();
    let operand_end = |c: char| c.is_ascii_digit() || c == ')' || c == '%';
    let operand_start = |c: char| c.is_ascii_digit() || c == '(' || c == '.' || c == '$';
    let mut out = BTreeSet::new();
    for (i, &c) in chars.iter().enumerate() {
        let Some(op) = Operation::from_char(c) else { continue };
        let left = chars[..i].iter().rev().find(|c| !c.is_whitespace());
        let right = chars[i + 1..].iter().find(|c| !c.is_whitespace());
        if left.is_some_and(|&c| operand_end(c)) && right.is_some_and(|&c| operand_start(c)) {
            out.insert(op);
        }
    }
    out
}
