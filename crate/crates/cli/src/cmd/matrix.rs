use std::path::PathBuf;

use clap::Args;
use xfer::io::matrix::{load_matrix_csv, PerformanceMatrix};
use xfer::io::records::{aggregate_records, load_eval_records};
use xfer::pca::{label_components, pca as decompose, zscore_columns, DEFAULT_COMPONENTS, DEFAULT_GROUP_THRESHOLD};
use xfer::stats::profile::load_profiles_dir;
use xfer::transfer::{
    asymmetry, categorize_pairs, gain_matrix, row_diff, AliasMap, PairTransfer, DEFAULT_KS_THRESHOLD,
    DEFAULT_TV_THRESHOLD,
};

use crate::artifact::{Artifact, GainTable, MatrixArtifact, Orientation, PcaArtifact, RowDiff, TransferArtifact};
use crate::error::{CliError, Result};
use crate::run::{round_to, Run};
use crate::Ctx;

#[derive(Args)]
pub struct AggregateArgs {
    /// Scored records, one JSON object per line.
    #[arg(long)]
    records: PathBuf,
    /// Row label of the un-fine-tuned model [default: "None" when present].
    #[arg(long)]
    baseline: Option<String>,
}

fn rows_of(m: &PerformanceMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn load_matrix(run: &mut Run, path: &PathBuf, baseline: Option<&str>) -> Result<PerformanceMatrix> {
    run.input(path)?;
    let m = load_matrix_csv(path)?;
    Ok(match baseline {
        Some(b) => m.with_baseline(b)?,
        None => m,
    })
}

pub fn aggregate(ctx: &Ctx, args: AggregateArgs) -> Result<()> {
    let mut run = Run::new("aggregate", &ctx.out_dir)?;
    run.input(&args.records)?;
    let mut m = aggregate_records(&load_eval_records(&args.records)?)?;
    match &args.baseline {
        Some(b) => m = m.with_baseline(b)?,
        None if m.row_index("None").is_some() => m = m.with_baseline("None")?,
        None => {}
    }
    run.param("baseline", m.baseline_row());
    let mut csv = Vec::new();
    m.write_csv(&mut csv)?;
    run.write_bytes("matrix.csv", &csv)?;
    run.write_artifact(&Artifact::Matrix(MatrixArtifact {
        row_labels: m.row_labels().to_vec(),
        col_labels: m.col_labels().to_vec(),
        values: rows_of(&m),
        baseline: m.baseline_row().map(str::to_string),
    }))?;
    run.finish()
}

#[derive(Args)]
pub struct PcaArgs {
    /// Performance matrix CSV.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = DEFAULT_COMPONENTS)]
    components: usize,
    /// Trait group cutoff as a fraction of the largest positive loading
    /// [default: 0.25].
    #[arg(long)]
    threshold: Option<f64>,
    /// Flip component COMP so TASK loads non-negatively, as COMP:TASK.
    /// Repeatable.
    #[arg(long = "orient", value_parser = parse_orientation)]
    orient: Vec<(usize, String)>,
    /// Comma-separated trait names, in component order.
    #[arg(long, value_delimiter = ',')]
    names: Vec<String>,
}

fn parse_orientation(s: &str) -> Result<(usize, String), String> {
    let (c, t) = s.split_once(':').ok_or_else(|| format!("expected COMP:TASK, got {s:?}"))?;
    let c = c.trim().trim_start_matches("PC").parse().map_err(|_| format!("bad component in {s:?}"))?;
    Ok((c, t.to_string()))
}

pub fn pca(ctx: &Ctx, args: PcaArgs) -> Result<()> {
    let mut run = Run::new("pca", &ctx.out_dir)?;
    let m = load_matrix(&mut run, &args.matrix, None)?;
    let threshold = args.threshold.or(ctx.config.pca_threshold).unwrap_or(DEFAULT_GROUP_THRESHOLD);
    run.param("components", args.components);
    run.param("threshold", threshold);
    run.param("orient", &args.orient);
    run.param("names", &args.names);

    let norm = zscore_columns(&m)?;
    let mut res = decompose(&norm, args.components)?;
    for (c, task) in &args.orient {
        res.orient_toward(*c, task)?;
    }
    let traits = label_components(&res, threshold)?.with_names(&args.names);
    run.write_artifact(&Artifact::Pca(PcaArtifact {
        cumulative_explained_variance: res.cumulative_explained_variance(),
        orientation: args.orient.into_iter().map(|(component, task)| Orientation { component, task }).collect(),
        col_means: norm.col_means,
        col_stds: norm.col_stds,
        pca: res,
        traits,
    }))?;
    run.finish()
}

#[derive(Args)]
pub struct TransferArgs {
    /// Performance matrix CSV with a baseline row.
    #[arg(long)]
    matrix: PathBuf,
    /// Baseline row label [default: "None"].
    #[arg(long)]
    baseline: Option<String>,
    /// JSON map from source row to evaluation column (null for non-source
    /// rows). Enables the asymmetry table.
    #[arg(long)]
    aliases: Option<PathBuf>,
    /// Row difference A minus B, as A,B. Repeatable.
    #[arg(long = "diff", value_parser = parse_pair)]
    diffs: Vec<(String, String)>,
    /// Directory of dataset profiles written by `profile`. Enables quadrants.
    #[arg(long)]
    profiles: Option<PathBuf>,
    /// JSON map from dataset name to domain; overrides profile domains.
    #[arg(long)]
    domains: Option<PathBuf>,
    #[arg(long)]
    ks_threshold: Option<f64>,
    #[arg(long)]
    tv_threshold: Option<f64>,
    /// Decimal places kept in gains and deltas.
    #[arg(long, default_value_t = 6)]
    decimals: u32,
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok((a.to_string(), b.to_string())),
        _ => Err(format!("expected A,B, got {s:?}")),
    }
}

pub fn transfer(ctx: &Ctx, args: TransferArgs) -> Result<()> {
    let mut run = Run::new("transfer", &ctx.out_dir)?;
    let m = load_matrix(&mut run, &args.matrix, args.baseline.as_deref())?;
    let d = args.decimals;
    let r = |v: f64| round_to(v, d);
    run.param("decimals", d);
    run.param("baseline", m.baseline_row());

    // gains need a baseline row; row differences do not
    let gains = match m.baseline_row() {
        Some(_) => Some(gain_matrix(&m)?),
        None => None,
    };
    let need_gains = |what: &str| {
        gains.as_ref().ok_or_else(|| CliError::Config(format!("{what} needs a baseline row (--baseline)")))
    };
    let table = gains.as_ref().map(|g| GainTable {
        baseline_label: g.baseline_label.clone(),
        baseline: g.baseline.iter().map(|&v| r(v)).collect(),
        row_labels: g.row_labels.clone(),
        col_labels: g.col_labels.clone(),
        values: g.values.chunks(g.col_labels.len()).map(|row| row.iter().map(|&v| r(v)).collect()).collect(),
    });

    let alias_path = args.aliases.clone().or_else(|| ctx.config.aliases.clone());
    let aliases = match &alias_path {
        Some(p) => {
            run.input(p)?;
            run.param("aliases", p.display().to_string());
            Some(AliasMap::load(p)?)
        }
        None => None,
    };
    let asym = match &aliases {
        Some(a) => {
            let pairs = asymmetry(need_gains("asymmetry")?, a)?;
            Some(
                pairs
                    .into_iter()
                    .map(|p| PairTransfer {
                        gain_ab: r(p.gain_ab),
                        gain_ba: p.gain_ba.map(r),
                        asymmetry: p.asymmetry.map(r),
                        ..p
                    })
                    .collect(),
            )
        }
        None => None,
    };

    run.param("diffs", &args.diffs);
    let row_diffs = args
        .diffs
        .iter()
        .map(|(a, b)| {
            let deltas = row_diff(&m, a, b)?
                .into_iter()
                .map(|mut t| {
                    t.delta = r(t.delta);
                    t
                })
                .collect();
            Ok(RowDiff { a: a.clone(), b: b.clone(), deltas })
        })
        .collect::<Result<Vec<_>>>()?;

    let quadrants = match &args.profiles {
        Some(dir) => {
            run.input_dir(dir)?;
            let profiles = load_profiles_dir(dir)?;
            let mut domains: std::collections::BTreeMap<String, String> = profiles
                .iter()
                .filter_map(|(n, p)| p.domain.clone().map(|d| (n.clone(), d)))
                .collect();
            if let Some(p) = &args.domains {
                run.input(p)?;
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                let extra: std::collections::BTreeMap<String, String> = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                domains.extend(extra);
            }
            let ks = args.ks_threshold.or(ctx.config.ks_threshold).unwrap_or(DEFAULT_KS_THRESHOLD);
            let tv = args.tv_threshold.or(ctx.config.tv_threshold).unwrap_or(DEFAULT_TV_THRESHOLD);
            run.param("ks_threshold", ks);
            run.param("tv_threshold", tv);
            // non-source rows (few-shot baselines) have no training set to profile
            let gains = need_gains("quadrant categorization")?;
            let sources = match &aliases {
                Some(a) => gains.retain_rows(|row| a.is_source(row)),
                None => gains.clone(),
            };
            let mut q = categorize_pairs(&sources, &profiles, &domains, ks, tv)?;
            q.entries.iter_mut().for_each(|e| e.gain = r(e.gain));
            Some(q)
        }
        None if args.domains.is_some() => {
            return Err(CliError::Config("--domains needs --profiles".into()));
        }
        None => None,
    };

    run.write_artifact(&Artifact::Transfer(TransferArtifact {
        decimals: d,
        gains: table,
        asymmetry: asym,
        row_diffs,
        quadrants,
    }))?;
    run.finish()
}
