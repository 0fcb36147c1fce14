use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;
use xfer::io::conllu::{group_documents, load_conllu};
use xfer::io::read_jsonl;
use xfer::io::records::load_eval_records;
use xfer::lingfeat::{
    feature_improvement_correlation, importance_table, operation_tags, relation_importance, FeatureExtractor,
    FeatureKey, Lexicons,
};

use crate::artifact::{Artifact, LingfeatArtifact, ProblemFeatures};
use crate::error::{CliError, Result};
use crate::run::Run;
use crate::Ctx;

#[derive(Clone, Copy, ValueEnum)]
enum ParseKey {
    Deprel,
    Upos,
}

#[derive(Args)]
pub struct LingfeatArgs {
    /// Scored records of the base model; `example_id` names the problem.
    #[arg(long)]
    base: PathBuf,
    /// Scored records of the fine-tuned model.
    #[arg(long)]
    adapter: PathBuf,
    /// Parsed problems, one `# newdoc id = <problem id>` document each.
    #[arg(long, required_unless_present_any = ["problems", "solutions"])]
    conllu: Option<PathBuf>,
    /// Parse field tallied from --conllu.
    #[arg(long, value_enum, default_value = "deprel")]
    key: ParseKey,
    /// Problem texts (`{"id","question"}` lines) for feature correlation.
    #[arg(long)]
    problems: Option<PathBuf>,
    /// Reference solutions (`{"id","solution"}` lines) for operation importance.
    #[arg(long)]
    solutions: Option<PathBuf>,
    /// Lexicon JSON replacing the bundled word lists.
    #[arg(long)]
    lexicons: Option<PathBuf>,
}

#[derive(Deserialize)]
struct Problem {
    id: String,
    question: String,
}

#[derive(Deserialize)]
struct Solution {
    id: String,
    solution: String,
}

fn score_map(run: &mut Run, path: &PathBuf) -> Result<BTreeMap<String, u8>> {
    run.input(path)?;
    let mut out = BTreeMap::new();
    for r in load_eval_records(path)? {
        if out.insert(r.example_id.clone(), r.score).is_some() {
            return Err(CliError::Core(xfer::Error::Schema(format!(
                "{}: example {:?} scored more than once",
                path.display(),
                r.example_id
            ))));
        }
    }
    Ok(out)
}

struct Scores {
    base: BTreeMap<String, u8>,
    adapter: BTreeMap<String, u8>,
}

impl Scores {
    /// Base and adapter scores for `ids`, in order.
    fn lookup<'a>(&self, ids: impl Iterator<Item = &'a str>) -> Result<(Vec<u8>, Vec<u8>)> {
        let mut b = Vec::new();
        let mut a = Vec::new();
        for id in ids {
            let get = |m: &BTreeMap<String, u8>, which: &str| {
                m.get(id).copied().ok_or_else(|| {
                    CliError::Core(xfer::Error::Lookup(format!("no {which} score for problem {id:?}")))
                })
            };
            b.push(get(&self.base, "base")?);
            a.push(get(&self.adapter, "adapter")?);
        }
        Ok((b, a))
    }
}

pub fn lingfeat(ctx: &Ctx, args: LingfeatArgs) -> Result<()> {
    let mut run = Run::new("lingfeat", &ctx.out_dir)?;
    let scores = Scores { base: score_map(&mut run, &args.base)?, adapter: score_map(&mut run, &args.adapter)? };
    let mut out = LingfeatArtifact { relations: None, operations: None, features: Vec::new(), correlations: Vec::new() };

    if let Some(path) = &args.conllu {
        run.input(path)?;
        let key = match args.key {
            ParseKey::Deprel => FeatureKey::Deprel,
            ParseKey::Upos => FeatureKey::Upos,
        };
        run.param("key", key);
        let docs = group_documents(load_conllu(path)?);
        let (base, adapter) = scores.lookup(docs.iter().map(|(id, _)| id.as_str()))?;
        let problems: Vec<_> = docs.into_iter().map(|(_, s)| s).collect();
        out.relations = Some(relation_importance(&problems, &base, &adapter, key)?);
    }

    if let Some(path) = &args.problems {
        run.input(path)?;
        let lexicons = match args.lexicons.as_ref().or(ctx.config.lexicons.as_ref()) {
            Some(p) => {
                run.input(p)?;
                Lexicons::load(p)?
            }
            None => Lexicons::default(),
        };
        run.param("lexicon_version", lexicons.version);
        let extractor = FeatureExtractor::new(&lexicons)?;
        let problems: Vec<Problem> = read_jsonl(path)?;
        let (base, adapter) = scores.lookup(problems.iter().map(|p| p.id.as_str()))?;
        out.features = problems
            .iter()
            .map(|p| ProblemFeatures { id: p.id.clone(), features: extractor.extract(&p.question) })
            .collect();
        let feats: Vec<_> = out.features.iter().map(|f| f.features).collect();
        out.correlations = feature_improvement_correlation(&feats, &base, &adapter)?;
    }

    if let Some(path) = &args.solutions {
        run.input(path)?;
        let solutions: Vec<Solution> = read_jsonl(path)?;
        let (base, adapter) = scores.lookup(solutions.iter().map(|s| s.id.as_str()))?;
        let keys: Vec<BTreeSet<String>> = solutions
            .iter()
            .map(|s| operation_tags(&s.solution).into_iter().map(|o| o.as_str().to_string()).collect())
            .collect();
        out.operations = Some(importance_table(FeatureKey::Operation, &keys, &base, &adapter)?);
    }

    run.write_artifact(&Artifact::Lingfeat(out))?;
    run.finish()
}
