use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::Args;
use serde::Deserialize;
use xfer::classify::{bias_metrics, confusion_matrix, normalize_label, outcome_conditioned_lengths};
use xfer::io::dataset::{corrupt_labels, load_dataset, LabeledDataset};
use xfer::io::read_jsonl;
use xfer::stats::length::LengthUnit;
use xfer::stats::{class_profile, complete_targets, parse_target_proportions, profile_dataset, rebalance_plan};

use crate::artifact::{Artifact, ConfusionArtifact, RebalanceArtifact, RebalanceMode};
use crate::error::{CliError, Result};
use crate::run::Run;
use crate::Ctx;

#[derive(Args)]
pub struct ProfileArgs {
    /// Dataset JSONL with `id`, `text` and optional `label`.
    #[arg(long)]
    dataset: PathBuf,
    /// Dataset name [default: file stem].
    #[arg(long)]
    name: Option<String>,
    /// Domain tag used when grouping transfer pairs.
    #[arg(long)]
    domain: Option<String>,
    /// Length unit for per-class lengths and KS comparisons: tokens or chars.
    #[arg(long, default_value = "tokens")]
    unit: LengthUnit,
}

fn stem(p: &std::path::Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "dataset".into())
}

pub fn profile(ctx: &Ctx, args: ProfileArgs) -> Result<()> {
    let mut run = Run::new("profile", &ctx.out_dir)?;
    run.input(&args.dataset)?;
    let name = args.name.unwrap_or_else(|| stem(&args.dataset));
    run.param("name", &name);
    run.param("domain", &args.domain);
    run.param("unit", args.unit);
    let mut ds = load_dataset(&args.dataset)?;
    if let Some(d) = args.domain {
        ds = ds.with_domain(d);
    }
    run.write_artifact(&Artifact::Profile(profile_dataset(&name, &ds, args.unit)?))?;
    run.finish()
}

#[derive(Args)]
pub struct RebalanceArgs {
    /// Labeled dataset JSONL.
    #[arg(long)]
    dataset: PathBuf,
    /// Target shares as `label:p,...`. Unlisted classes split the remainder
    /// in their observed ratio.
    #[arg(long, required_unless_present = "corrupt", conflicts_with = "corrupt")]
    target: Option<String>,
    /// Instead of resampling, reassign this fraction of labels at random.
    #[arg(long)]
    corrupt: Option<f64>,
}

fn labels_of(ds: &LabeledDataset) -> Result<&[String]> {
    ds.labels
        .as_deref()
        .ok_or_else(|| CliError::Core(xfer::Error::Schema("dataset has no labels".into())))
}

pub fn rebalance(ctx: &Ctx, args: RebalanceArgs) -> Result<()> {
    let mut run = Run::new("rebalance", &ctx.out_dir)?;
    run.input(&args.dataset)?;
    run.param("seed", ctx.seed);
    let ds = load_dataset(&args.dataset)?;
    let before = class_profile(labels_of(&ds)?)?;
    let (mode, out, name) = match (&args.target, args.corrupt) {
        (Some(spec), _) => {
            run.param("target", spec);
            let labels = labels_of(&ds)?;
            let targets = complete_targets(labels, &parse_target_proportions(spec)?)?;
            let keep = rebalance_plan(labels, &targets, ctx.seed)?;
            (RebalanceMode::Targets { targets }, ds.select(&keep), "rebalanced.jsonl")
        }
        (None, Some(fraction)) => {
            run.param("corrupt", fraction);
            (RebalanceMode::Corrupt { fraction }, corrupt_labels(&ds, fraction, ctx.seed)?, "corrupted.jsonl")
        }
        (None, None) => unreachable!("clap requires --target or --corrupt"),
    };
    let after = class_profile(labels_of(&out)?)?;
    run.write_jsonl(name, &out.to_lines())?;
    run.write_artifact(&Artifact::Rebalance(RebalanceArtifact { mode, seed: ctx.seed, before, after }))?;
    run.finish()
}

#[derive(Args)]
pub struct ConfusionArgs {
    /// JSONL with `prediction`, `gold` and, for outcome lengths, `text`.
    #[arg(long)]
    predictions: PathBuf,
    /// Comma-separated label set [default: distinct gold labels, sorted].
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    /// Positive class of a binary task; adds outcome-conditioned lengths.
    #[arg(long)]
    positive: Option<String>,
    #[arg(long, default_value = "tokens")]
    unit: LengthUnit,
}

#[derive(Deserialize)]
struct PredictionLine {
    prediction: String,
    gold: String,
    #[serde(default)]
    text: Option<String>,
}

pub fn confusion(ctx: &Ctx, args: ConfusionArgs) -> Result<()> {
    let mut run = Run::new("confusion", &ctx.out_dir)?;
    run.input(&args.predictions)?;
    let lines: Vec<PredictionLine> = read_jsonl(&args.predictions)?;
    let labels: Vec<String> = if args.labels.is_empty() {
        lines.iter().map(|l| normalize_label(&l.gold)).collect::<BTreeSet<_>>().into_iter().collect()
    } else {
        args.labels
    };
    run.param("labels", &labels);
    run.param("positive", &args.positive);
    let pairs: Vec<(&str, &str)> = lines.iter().map(|l| (l.prediction.as_str(), l.gold.as_str())).collect();
    let cm = confusion_matrix(&pairs, &labels)?;
    let bias = bias_metrics(&cm);
    let outcomes = match &args.positive {
        Some(pos) => {
            run.param("unit", args.unit);
            let texts = lines
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    l.text.as_deref().ok_or_else(|| {
                        CliError::Core(xfer::Error::Schema(format!("line {} has no text for outcome lengths", i + 1)))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Some(outcome_conditioned_lengths(&pairs, &texts, &labels, pos, args.unit)?)
        }
        None => None,
    };
    run.write_artifact(&Artifact::Confusion(ConfusionArtifact { confusion: cm, bias, outcomes }))?;
    run.finish()
}
