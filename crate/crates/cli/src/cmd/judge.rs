use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use xfer::io::records::load_unscored_records;
use xfer_client::{Client, JudgeCache};

use super::block_on;
use crate::artifact::{Artifact, JudgeArtifact};
use crate::error::{CliError, Result};
use crate::run::Run;
use crate::Ctx;

#[derive(Args)]
pub struct JudgeArgs {
    /// Unscored generations (`model_id`, `task_id`, `example_id`,
    /// `prediction`, `gold`).
    #[arg(long)]
    records: PathBuf,
    /// Append-only score cache, reused across runs.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Serialize)]
struct Failure<'a> {
    model_id: &'a str,
    task_id: &'a str,
    example_id: &'a str,
    kind: &'static str,
    message: String,
}

pub fn judge(ctx: &Ctx, args: JudgeArgs) -> Result<()> {
    let mut run = Run::new("judge", &ctx.out_dir)?;
    let endpoint = ctx
        .config
        .judge
        .clone()
        .ok_or_else(|| CliError::Config("judge needs a `judge` endpoint in --config".into()))?;
    run.input(&args.records)?;
    let records = load_unscored_records(&args.records)?;
    let model = endpoint.model.clone();
    run.param("model", &model);
    let cache = match args.cache.as_ref().or(ctx.config.judge_cache.as_ref()) {
        Some(p) => JudgeCache::open(p)?,
        None => JudgeCache::in_memory(),
    };
    let client = Client::new(endpoint, cache)?;
    let (scored, failed) = block_on(client.judge_records(records))?;

    run.write_jsonl("scored.jsonl", &scored)?;
    let failures: Vec<Failure> = failed
        .iter()
        .map(|(r, e)| Failure {
            model_id: &r.model_id,
            task_id: &r.task_id,
            example_id: &r.example_id,
            kind: e.kind(),
            message: e.to_string(),
        })
        .collect();
    if !failures.is_empty() {
        run.write_jsonl("failures.jsonl", &failures)?;
    }
    run.write_artifact(&Artifact::Judge(JudgeArtifact {
        model,
        scored: scored.len(),
        failed: failures.len(),
        correct: scored.iter().filter(|r| r.score == 1).count(),
    }))?;
    run.finish()?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Partial(format!("{} record(s) could not be scored; see failures.jsonl", failures.len())))
    }
}
