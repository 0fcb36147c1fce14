use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::Args;
use xfer::io::dataset::load_dataset;
use xfer::io::embedding::{load_embeddings, subsample_indices, EmbeddingLine, EmbeddingSet};
use xfer::similarity::{similarity_matrix, SimilarityKind, SAMPLE_CAP};
use xfer_client::{Client, JudgeCache};

use super::{block_on, named_path};
use crate::artifact::{slug, Artifact, SimilarityArtifact};
use crate::error::{CliError, Result};
use crate::run::Run;
use crate::Ctx;

#[derive(Args)]
pub struct SimilarityArgs {
    /// Precomputed embeddings as NAME=PATH (`{"id","vector"}` lines). Repeatable.
    #[arg(long = "set", value_parser = named_path)]
    sets: Vec<(String, PathBuf)>,
    /// Dataset JSONL to embed through the configured endpoint, as NAME=PATH.
    /// Repeatable.
    #[arg(long = "texts", value_parser = named_path)]
    texts: Vec<(String, PathBuf)>,
    /// semantic or stylistic; recorded with the result.
    #[arg(long, default_value = "semantic")]
    kind: SimilarityKind,
    /// Vectors sampled per dataset.
    #[arg(long, default_value_t = SAMPLE_CAP)]
    cap: usize,
}

pub fn similarity(ctx: &Ctx, args: SimilarityArgs) -> Result<()> {
    let mut run = Run::new("similarity", &ctx.out_dir)?;
    let mut seen = BTreeSet::new();
    if let Some(dup) = args.sets.iter().chain(&args.texts).map(|(n, _)| n).find(|n| !seen.insert(*n)) {
        return Err(CliError::Config(format!("dataset name {dup:?} given twice")));
    }
    if args.cap == 0 {
        return Err(CliError::Config("--cap must be at least 1".into()));
    }
    run.param("kind", args.kind);
    run.param("cap", args.cap);
    run.param("seed", ctx.seed);

    let mut sets: Vec<(String, EmbeddingSet)> = Vec::new();
    for (name, path) in &args.sets {
        run.input(path)?;
        sets.push((name.clone(), load_embeddings(path)?.subsample(args.cap, ctx.seed)));
    }
    if !args.texts.is_empty() {
        let endpoint = ctx
            .config
            .embeddings
            .clone()
            .ok_or_else(|| CliError::Config("--texts needs an `embeddings` endpoint in --config".into()))?;
        run.param("embedding_model", &endpoint.model);
        let client = Client::new(endpoint, JudgeCache::in_memory())?;
        for (name, path) in &args.texts {
            run.input(path)?;
            let ds = load_dataset(path)?;
            let ds = ds.select(&subsample_indices(ds.len(), args.cap, ctx.seed));
            let fetched = block_on(client.embed(&ds.texts))??;
            let set = EmbeddingSet::new(ds.ids.clone(), fetched.vectors().to_vec())?;
            let lines: Vec<EmbeddingLine> = set
                .ids()
                .iter()
                .zip(set.vectors())
                .map(|(id, v)| EmbeddingLine { id: id.clone(), vector: v.clone() })
                .collect();
            run.write_jsonl(&format!("embeddings/{}.jsonl", slug(name)), &lines)?;
            sets.push((name.clone(), set));
        }
    }

    let sizes: BTreeMap<String, usize> = sets.iter().map(|(n, s)| (n.clone(), s.len())).collect();
    let m = similarity_matrix(&sets, args.kind)?;
    run.write_artifact(&Artifact::Similarity(SimilarityArtifact {
        kind: m.kind,
        cap: args.cap,
        seed: ctx.seed,
        sizes,
        labels: m.labels,
        values: m.values,
    }))?;
    run.finish()
}
