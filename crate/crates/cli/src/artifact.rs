//! JSON artifacts written by the subcommands and the figures derived from
//! them. Every artifact carries an `"artifact"` tag so `report` can rebuild
//! its figures later.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use xfer::classify::{BiasMetrics, ConfusionMatrix, OutcomeLengths};
use xfer::lingfeat::{FeatureCorrelation, ImportanceRatioTable, MathFeatures};
use xfer::pca::{PcaResult, TraitReport};
use xfer::report::{render_gain_table, render_heatmap, render_kde, render_scree, ColorScale, LabeledMatrix};
use xfer::similarity::SimilarityKind;
use xfer::stats::profile::DatasetProfile;
use xfer::stats::{kde, ClassProfile};
use xfer::transfer::{PairTransfer, QuadrantTable, TaskDelta};

use crate::error::Result;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "artifact", rename_all = "snake_case")]
pub enum Artifact {
    Matrix(MatrixArtifact),
    Pca(PcaArtifact),
    Transfer(TransferArtifact),
    Profile(DatasetProfile),
    Rebalance(RebalanceArtifact),
    Confusion(ConfusionArtifact),
    Similarity(SimilarityArtifact),
    Lingfeat(LingfeatArtifact),
    Judge(JudgeArtifact),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixArtifact {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub baseline: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Orientation {
    pub component: usize,
    pub task: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PcaArtifact {
    pub cumulative_explained_variance: f64,
    pub orientation: Vec<Orientation>,
    pub col_means: Vec<f64>,
    pub col_stds: Vec<f64>,
    pub pca: PcaResult,
    pub traits: TraitReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GainTable {
    pub baseline_label: String,
    pub baseline: Vec<f64>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RowDiff {
    pub a: String,
    pub b: String,
    pub deltas: Vec<TaskDelta>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TransferArtifact {
    pub decimals: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymmetry: Option<Vec<PairTransfer>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub row_diffs: Vec<RowDiff>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrants: Option<QuadrantTable>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum RebalanceMode {
    Targets { targets: BTreeMap<String, f64> },
    Corrupt { fraction: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RebalanceArtifact {
    #[serde(flatten)]
    pub mode: RebalanceMode,
    pub seed: u64,
    pub before: ClassProfile,
    pub after: ClassProfile,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ConfusionArtifact {
    pub confusion: ConfusionMatrix,
    pub bias: BiasMetrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<OutcomeLengths>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SimilarityArtifact {
    pub kind: SimilarityKind,
    pub cap: usize,
    pub seed: u64,
    /// Vectors used per dataset after subsampling.
    pub sizes: BTreeMap<String, usize>,
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProblemFeatures {
    pub id: String,
    pub features: MathFeatures,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LingfeatArtifact {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relations: Option<ImportanceRatioTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operations: Option<ImportanceRatioTable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub features: Vec<ProblemFeatures>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub correlations: Vec<FeatureCorrelation>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JudgeArtifact {
    pub model: String,
    pub scored: usize,
    pub failed: usize,
    pub correct: usize,
}

/// File-name-safe form of a label.
pub fn slug(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect()
}

fn importance_figure(name: &str, table: &ImportanceRatioTable) -> Result<Option<(String, String)>> {
    let (keys, values): (Vec<String>, Vec<Vec<f64>>) = table
        .rows
        .iter()
        .filter_map(|(k, r)| r.ratio.map(|x| (k.clone(), vec![x])))
        .unzip();
    if keys.is_empty() {
        return Ok(None);
    }
    let max = values.iter().flatten().fold(1.0f64, |a, &v| a.max(v));
    let cols = ["adapter / base".to_string()];
    let m = LabeledMatrix { row_labels: &keys, col_labels: &cols, values: &values };
    Ok(Some((name.to_string(), render_heatmap(&m, &ColorScale::sequential(0.0, max), true)?)))
}

impl Artifact {
    /// SVG figures for this artifact as `(file name, svg)`.
    pub fn figures(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        match self {
            Artifact::Matrix(m) => {
                let lm = LabeledMatrix { row_labels: &m.row_labels, col_labels: &m.col_labels, values: &m.values };
                out.push(("matrix.svg".into(), render_heatmap(&lm, &ColorScale::sequential(0.0, 100.0), true)?));
            }
            Artifact::Pca(p) => {
                out.push(("scree.svg".into(), render_scree(&p.pca.explained_variance_ratio)?));
                let rows: Vec<String> = (0..p.pca.k()).map(|i| format!("PC{i}")).collect();
                let lm = LabeledMatrix { row_labels: &rows, col_labels: &p.pca.col_labels, values: &p.pca.components };
                out.push(("loadings.svg".into(), render_heatmap(&lm, &ColorScale::diverging(1.0), true)?));
            }
            Artifact::Transfer(t) => {
                if let Some(g) = &t.gains {
                    let lm = LabeledMatrix { row_labels: &g.row_labels, col_labels: &g.col_labels, values: &g.values };
                    out.push(("gains.svg".into(), render_gain_table(&lm)?));
                }
            }
            Artifact::Profile(p) => {
                let unit = p.length_unit;
                let mut curves = vec![("all".to_string(), kde(&p.lengths(unit).samples_f64(), None)?)];
                for (label, prof) in &p.per_class {
                    curves.push((label.clone(), kde(&prof.samples_f64(), None)?));
                }
                let x_label = format!("length ({})", serde_json::to_value(unit).expect("unit").as_str().unwrap_or_default());
                out.push((format!("kde_{}.svg", slug(&p.name)), render_kde(&curves, &x_label)?));
            }
            Artifact::Confusion(c) => {
                let mut cols = c.confusion.labels.clone();
                cols.push("unparseable".into());
                let values = c.confusion.row_normalized();
                let lm = LabeledMatrix { row_labels: &c.confusion.labels, col_labels: &cols, values: &values };
                out.push(("confusion.svg".into(), render_heatmap(&lm, &ColorScale::sequential(0.0, 1.0), true)?));
                if let Some(o) = &c.outcomes {
                    let buckets = [
                        ("true positive", &o.true_pos),
                        ("false positive", &o.false_pos),
                        ("false negative", &o.false_neg),
                        ("true negative", &o.true_neg),
                    ];
                    let mut curves = Vec::new();
                    for (name, b) in buckets {
                        if let Some(p) = &b.profile {
                            curves.push((name.to_string(), kde(&p.samples_f64(), None)?));
                        }
                    }
                    if !curves.is_empty() {
                        out.push(("outcome_lengths.svg".into(), render_kde(&curves, "input length")?));
                    }
                }
            }
            Artifact::Similarity(s) => {
                let lo = s.values.iter().flatten().fold(0.0f64, |a, &v| a.min(v));
                let lm = LabeledMatrix { row_labels: &s.labels, col_labels: &s.labels, values: &s.values };
                out.push(("similarity.svg".into(), render_heatmap(&lm, &ColorScale::sequential(lo, 1.0), true)?));
            }
            Artifact::Lingfeat(l) => {
                if let Some(t) = &l.relations {
                    out.extend(importance_figure("relation_importance.svg", t)?);
                }
                if let Some(t) = &l.operations {
                    out.extend(importance_figure("operation_importance.svg", t)?);
                }
            }
            Artifact::Rebalance(_) | Artifact::Judge(_) => {}
        }
        Ok(out)
    }

    /// Default JSON file name.
    pub fn file_name(&self) -> String {
        match self {
            Artifact::Matrix(_) => "matrix.json".into(),
            Artifact::Pca(_) => "pca.json".into(),
            Artifact::Transfer(_) => "transfer.json".into(),
            Artifact::Profile(p) => format!("profiles/{}.json", slug(&p.name)),
            Artifact::Rebalance(_) => "rebalance.json".into(),
            Artifact::Confusion(_) => "confusion.json".into(),
            Artifact::Similarity(_) => "similarity.json".into(),
            Artifact::Lingfeat(_) => "lingfeat.json".into(),
            Artifact::Judge(_) => "judge.json".into(),
        }
    }
}
