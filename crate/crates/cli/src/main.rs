use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod artifact;
mod cmd;
mod config;
mod error;
mod run;

use config::{RunConfig, DEFAULT_SEED};
use error::Result;

#[derive(Parser)]
#[command(name = "xfer", version, about = "Analyze cross-task transfer in fine-tuned model matrices")]
struct Cli {
    /// Directory receiving JSON/SVG artifacts and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Seed for sampling and shuffling [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// JSON run configuration (thresholds, paths, endpoints).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate per-example records into a performance matrix.
    Aggregate(cmd::matrix::AggregateArgs),
    /// Decompose a performance matrix into latent traits.
    Pca(cmd::matrix::PcaArgs),
    /// Gains over the baseline, asymmetry, row differences, quadrants.
    Transfer(cmd::matrix::TransferArgs),
    /// Length and class statistics of a dataset.
    Profile(cmd::data::ProfileArgs),
    /// Resample a dataset to target class shares, or corrupt its labels.
    Rebalance(cmd::data::RebalanceArgs),
    /// Confusion matrix, label bias and outcome-conditioned lengths.
    Confusion(cmd::data::ConfusionArgs),
    /// Centroid cosine similarity between datasets.
    Similarity(cmd::similarity::SimilarityArgs),
    /// Linguistic feature correlation and relation importance.
    Lingfeat(cmd::lingfeat::LingfeatArgs),
    /// Score generations with an LLM judge.
    Judge(cmd::judge::JudgeArgs),
    /// Re-render figures from a JSON artifact.
    Report(cmd::report::ReportArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Aggregate(_) => "aggregate",
            Command::Pca(_) => "pca",
            Command::Transfer(_) => "transfer",
            Command::Profile(_) => "profile",
            Command::Rebalance(_) => "rebalance",
            Command::Confusion(_) => "confusion",
            Command::Similarity(_) => "similarity",
            Command::Lingfeat(_) => "lingfeat",
            Command::Judge(_) => "judge",
            Command::Report(_) => "report",
        }
    }
}

pub struct Ctx {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub config: RunConfig,
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = Ctx {
        out_dir: cli.out_dir,
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        config,
    };
    match cli.command {
        Command::Aggregate(a) => cmd::matrix::aggregate(&ctx, a),
        Command::Pca(a) => cmd::matrix::pca(&ctx, a),
        Command::Transfer(a) => cmd::matrix::transfer(&ctx, a),
        Command::Profile(a) => cmd::data::profile(&ctx, a),
        Command::Rebalance(a) => cmd::data::rebalance(&ctx, a),
        Command::Confusion(a) => cmd::data::confusion(&ctx, a),
        Command::Similarity(a) => cmd::similarity::similarity(&ctx, a),
        Command::Lingfeat(a) => cmd::lingfeat::lingfeat(&ctx, a),
        Command::Judge(a) => cmd::judge::judge(&ctx, a),
        Command::Report(a) => cmd::report::report(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json(name));
            ExitCode::from(1)
        }
    }
}
