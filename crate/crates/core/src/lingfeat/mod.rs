//! Surface features of math word problems and per-feature success ratios.

mod features;
mod importance;
mod lexicon;

pub use features::{
    extract_math_features, operation_tags, split_sentences, step_count, FeatureExtractor,
    MathFeatures, Operation, FEATURE_NAMES, NUMBER_PATTERN,
};
pub use importance::{
    feature_improvement_correlation, importance_table, pearson, problem_keys,
    relation_importance, FeatureCorrelation, FeatureKey, ImportanceRatioTable, ImportanceRow,
};
pub use lexicon::{Lexicons, UnitConversion};
