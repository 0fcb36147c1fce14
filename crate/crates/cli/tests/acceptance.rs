//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report reads top to bottom. The
//! process fails on any unexpected FAIL, and also when a criterion listed in
//! `KNOWN_FAILURES` starts passing, so the list cannot go stale.

#[allow(dead_code)]
#[path = "../../client/tests/mock/mod.rs"]
mod mock;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::sync::atomic::Ordering;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use xfer::io::matrix::PerformanceMatrix;
use xfer::pca::{max_components, pca, zscore_columns};
use xfer::stats::kde::{kde, GRID_POINTS};
use xfer::stats::ks::ks_distance;

/// Criteria that fail for a documented reason (see README, "Known deviations").
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    2,
    "max-|loading| sign convention points PC0 at the NLI tasks on this matrix; \
     the reported group is recovered only by orienting PC0 toward GSM8K",
)];

type Check = fn(&Env) -> Result<String, String>;

struct Env {
    bin: PathBuf,
    data: PathBuf,
    golden_prompt: PathBuf,
    tmp: tempfile::TempDir,
    rt: tokio::runtime::Runtime,
}

impl Env {
    fn xfer(&self, args: &[&str]) -> Output {
        Command::new(&self.bin).args(args).current_dir(self.tmp.path()).output().expect("spawn xfer")
    }

    fn xfer_ok(&self, args: &[&str]) -> Result<(), String> {
        let out = self.xfer(args);
        if out.status.success() {
            Ok(())
        } else {
            Err(format!("xfer {} exited {:?}: {}", args.join(" "), out.status.code(), String::from_utf8_lossy(&out.stderr)))
        }
    }

    fn data(&self, rel: &str) -> String {
        self.data.join(rel).display().to_string()
    }

    fn dir(&self, name: &str) -> String {
        self.tmp.path().join(name).display().to_string()
    }

    fn json(&self, rel: &str) -> Result<Value, String> {
        let p = self.tmp.path().join(rel);
        let text = fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))
    }

    fn write(&self, rel: &str, text: &str) -> String {
        let p = self.tmp.path().join(rel);
        fs::write(&p, text).unwrap();
        p.display().to_string()
    }

    fn mock(&self, delay_ms: u64) -> (Arc<mock::Mock>, String) {
        let m = Arc::new(mock::Mock::with_delay(delay_ms));
        let url = self.rt.block_on(mock::serve(m.clone()));
        (m, url)
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pca_loading(v: &Value, comp: usize, task: &str) -> Result<f64, String> {
    let cols = v["pca"]["col_labels"].as_array().ok_or("no col_labels")?;
    let j = cols.iter().position(|c| c == task).ok_or_else(|| format!("no task {task}"))?;
    v["pca"]["components"][comp][j].as_f64().ok_or_else(|| "missing loading".into())
}

fn c1_pca_variance(env: &Env) -> Result<String, String> {
    let t0 = Instant::now();
    env.xfer_ok(&["pca", "--matrix", &env.data("reference_matrix.csv"), "--components", "4", "--out-dir", &env.dir("c1")])?;
    let elapsed = t0.elapsed();
    let v = env.json("c1/pca.json")?;
    let ratios: Vec<f64> = v["pca"]["explained_variance_ratio"]
        .as_array()
        .ok_or("no ratios")?
        .iter()
        .filter_map(Value::as_f64)
        .collect();
    let cum: f64 = ratios.iter().sum();
    ensure(ratios.len() == 4, || format!("{} ratios", ratios.len()))?;
    ensure((0.70..=0.80).contains(&cum), || format!("cumulative {cum:.4} outside [0.70, 0.80]"))?;
    ensure(env.tmp.path().join("c1/scree.svg").exists(), || "no scree plot".into())?;
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("cumulative {cum:.4} in {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

fn c2_pc0_group(env: &Env) -> Result<String, String> {
    env.xfer_ok(&["pca", "--matrix", &env.data("reference_matrix.csv"), "--components", "4", "--out-dir", &env.dir("c2")])?;
    let v = env.json("c2/pca.json")?;
    let mut negative = Vec::new();
    for task in ["GSM8K", "Goat", "Magicoder", "Flipkart"] {
        let l = pca_loading(&v, 0, task)?;
        if l <= 0.0 {
            negative.push(format!("{task} {l:+.3}"));
        }
    }
    ensure(negative.is_empty(), || format!("non-positive PC0 loadings: {}", negative.join(", ")))?;
    Ok("GSM8K, Goat, Magicoder, Flipkart load positively".into())
}

fn c3_gains(env: &Env) -> Result<String, String> {
    env.xfer_ok(&["transfer", "--matrix", &env.data("reference_matrix.csv"), "--out-dir", &env.dir("c3")])?;
    let v = env.json("c3/transfer.json")?;
    let g = &v["gains"];
    let idx = |key: &str, label: &str| {
        g[key].as_array().and_then(|a| a.iter().position(|x| x == label)).ok_or_else(|| format!("no {label}"))
    };
    let want = [
        ("Magicoder", "GSM8K", 9.40),
        ("MetaMath", "Magicoder", -1.05),
        ("Flipkart", "GSM8K", 4.81),
        ("Amazon", "GSM8K", 3.19),
        ("IMDB", "GSM8K", 3.00),
        ("MetaMath", "Flipkart", -17.45),
    ];
    for (row, col, expect) in want {
        let got = g["values"][idx("row_labels", row)?][idx("col_labels", col)?].as_f64().ok_or("missing cell")?;
        ensure((got - expect).abs() <= 0.005, || format!("{row}->{col}: {got} vs {expect}"))?;
    }
    Ok(format!("{} quoted gains within 0.005", want.len()))
}

fn c4_row_diff(env: &Env) -> Result<String, String> {
    env.xfer_ok(&[
        "transfer",
        "--matrix",
        &env.data("mislabel_matrix.csv"),
        "--diff",
        "Amazon-mislabeled,Amazon",
        "--out-dir",
        &env.dir("c4"),
    ])?;
    let v = env.json("c4/transfer.json")?;
    let deltas: BTreeMap<String, f64> = v["row_diffs"][0]["deltas"]
        .as_array()
        .ok_or("no deltas")?
        .iter()
        .map(|d| (d["task"].as_str().unwrap_or_default().to_string(), d["delta"].as_f64().unwrap_or(f64::NAN)))
        .collect();
    ensure(deltas.get("GSM8K") == Some(&0.68), || format!("GSM8K delta {:?}", deltas.get("GSM8K")))?;
    ensure(deltas.get("IMDB") == Some(&0.15), || format!("IMDB delta {:?}", deltas.get("IMDB")))?;
    Ok("GSM8K +0.68, IMDB +0.15".into())
}

fn c5_class_profile(env: &Env) -> Result<String, String> {
    env.xfer_ok(&["profile", "--dataset", &env.data("flipkart_fixture.jsonl"), "--name", "Flipkart", "--out-dir", &env.dir("c5")])?;
    let v = env.json("c5/profiles/Flipkart.json")?;
    ensure(v["size"] == 1000, || format!("size {}", v["size"]))?;
    let p = &v["classes"]["proportions"];
    for (label, want) in [("positive", 0.812), ("negative", 0.139), ("neutral", 0.049)] {
        ensure(p[label].as_f64() == Some(want), || format!("{label}: {} vs {want}", p[label]))?;
    }
    Ok("0.812 / 0.139 / 0.049".into())
}

fn perf(i: usize, n: usize, v: Vec<f64>) -> PerformanceMatrix {
    PerformanceMatrix::new((0..i).map(|r| format!("r{r}")).collect(), (0..n).map(|c| format!("c{c}")).collect(), v)
        .unwrap()
}

fn c6_pca_numerics(_: &Env) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_rec, mut worst_orth) = (0.0f64, 0.0f64);
    for case in 0..200 {
        let i = rng.random_range(3..=20);
        let n = rng.random_range(2..=15);
        let v: Vec<f64> = (0..i * n).map(|_| rng.random_range(0.0..100.0)).collect();
        let norm = zscore_columns(&perf(i, n, v.clone())).map_err(|e| e.to_string())?;
        let k = max_components(i, n);
        let res = pca(&norm, k).map_err(|e| format!("case {case}: {e}"))?;

        // reconstruction from projections and loadings, computed here
        let mut rec = 0.0;
        for r in 0..i {
            for c in 0..n {
                let x: f64 = (0..k).map(|q| res.projections[r][q] * res.components[q][c]).sum();
                rec += (x - norm.values[r * n + c]).powi(2);
            }
        }
        let rec = rec.sqrt();
        worst_rec = worst_rec.max(rec);
        ensure(rec <= 1e-8, || format!("case {case} ({i}x{n}): reconstruction {rec:e}"))?;

        let mut orth = 0.0;
        for a in 0..k {
            for b in 0..k {
                let dot: f64 = res.components[a].iter().zip(&res.components[b]).map(|(x, y)| x * y).sum();
                orth += (dot - if a == b { 1.0 } else { 0.0 }).powi(2);
            }
        }
        let orth = orth.sqrt();
        worst_orth = worst_orth.max(orth);
        ensure(orth <= 1e-8, || format!("case {case}: orthonormality {orth:e}"))?;

        let total: f64 = res.explained_variance_ratio.iter().sum();
        ensure((total - 1.0).abs() <= 1e-8, || format!("case {case}: ratios sum {total}"))?;

        let col = rng.random_range(0..n);
        let scale = 2f64.powi(rng.random_range(-8..8));
        let scaled = v.iter().enumerate().map(|(idx, x)| if idx % n == col { x * scale } else { *x }).collect();
        let res2 = pca(&zscore_columns(&perf(i, n, scaled)).unwrap(), k).map_err(|e| e.to_string())?;
        for (a, b) in res.components.iter().flatten().zip(res2.components.iter().flatten()) {
            ensure((a - b).abs() <= 1e-12, || format!("case {case}: scaling moved a loading by {:e}", (a - b).abs()))?;
        }
    }
    Ok(format!("200 matrices; worst reconstruction {worst_rec:.1e}, orthonormality {worst_orth:.1e}"))
}

fn c7_kde(_: &Env) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let n = rng.random_range(2..300);
        let samples: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..400.0f64).round()).collect();
        let curve = kde(&samples, None).map_err(|e| e.to_string())?;
        ensure(curve.grid.len() == GRID_POINTS, || "grid size".into())?;
        let h = curve.bandwidth;
        for _ in 0..10 {
            let g = rng.random_range(0..GRID_POINTS);
            let x = curve.grid[g];
            let mut sum = 0.0;
            for s in &samples {
                let u = (x - s) / h;
                sum += (-0.5 * u * u).exp();
            }
            let naive = sum / ((2.0 * std::f64::consts::PI).sqrt() * n as f64 * h);
            let err = (curve.density[g] - naive).abs();
            worst = worst.max(err);
            ensure(err <= 1e-10, || format!("case {case}: density off by {err:e}"))?;
        }
        let mut area = 0.0;
        for w in 0..GRID_POINTS - 1 {
            area += 0.5 * (curve.grid[w + 1] - curve.grid[w]) * (curve.density[w] + curve.density[w + 1]);
        }
        ensure((area - 1.0).abs() <= 1e-3, || format!("case {case}: integral {area}"))?;
    }
    Ok(format!("50 sets; worst pointwise error {worst:.1e}"))
}

fn c8_ks(_: &Env) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..100 {
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let n = rng.random_range(1..80);
            (0..n).map(|_| f64::from(rng.random_range(0u32..40))).collect()
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let mut best = 0.0f64;
        for &x in a.iter().chain(&b) {
            let fa = a.iter().filter(|&&v| v <= x).count() as f64 / a.len() as f64;
            let fb = b.iter().filter(|&&v| v <= x).count() as f64 / b.len() as f64;
            best = best.max((fa - fb).abs());
        }
        let got = ks_distance(&a, &b).map_err(|e| e.to_string())?;
        ensure(got == best, || format!("case {case}: {got} vs exhaustive {best}"))?;
    }
    Ok("100 integer pairs equal the exhaustive sup".into())
}

fn class_counts(path: &Path) -> Result<BTreeMap<String, usize>, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut out = BTreeMap::new();
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        *out.entry(v["label"].as_str().unwrap_or_default().to_string()).or_insert(0) += 1;
    }
    Ok(out)
}

fn c9_rebalance(env: &Env) -> Result<String, String> {
    let data = env.data("flipkart_fixture.jsonl");
    let run = |dir: &str, seed: &str| {
        env.xfer_ok(&["rebalance", "--dataset", &data, "--target", "negative:0.5", "--seed", seed, "--out-dir", &env.dir(dir)])
    };
    run("c9a", "11")?;
    run("c9b", "11")?;
    run("c9c", "12")?;
    let targets = env.json("c9a/rebalance.json")?["targets"].clone();
    for dir in ["c9a", "c9c"] {
        let counts = class_counts(&env.tmp.path().join(dir).join("rebalanced.jsonl"))?;
        let total: usize = counts.values().sum();
        for (label, t) in targets.as_object().ok_or("no targets")? {
            let want = t.as_f64().unwrap() * total as f64;
            let got = *counts.get(label).unwrap_or(&0) as f64;
            ensure((got - want).abs() <= 1.0, || format!("{dir}: {label} has {got}, target {want:.2}"))?;
        }
    }
    let a = fs::read(env.tmp.path().join("c9a/rebalanced.jsonl")).unwrap();
    let b = fs::read(env.tmp.path().join("c9b/rebalanced.jsonl")).unwrap();
    let c = fs::read(env.tmp.path().join("c9c/rebalanced.jsonl")).unwrap();
    ensure(a == b, || "same seed produced different subsets".into())?;
    ensure(a != c, || "different seeds produced the same subset".into())?;
    let counts = class_counts(&env.tmp.path().join("c9a/rebalanced.jsonl"))?;
    Ok(format!("{counts:?}, identical per seed"))
}

fn judge_config(env: &Env, url: &str, name: &str, bound: usize) -> String {
    let cfg = json!({"judge": {"base_url": url, "model": "judge-model", "max_in_flight": bound, "backoff_ms": 5}});
    env.write(name, &cfg.to_string())
}

fn unscored(env: &Env, name: &str, n: usize) -> String {
    let mut text = String::new();
    for i in 0..n {
        let (gold, pred) = if i == 0 { ("42".to_string(), "42".to_string()) } else { (i.to_string(), i.to_string()) };
        let rec = json!({"model_id": "m", "task_id": "GSM8K", "example_id": format!("e{i:02}"), "prediction": pred, "gold": gold});
        text.push_str(&rec.to_string());
        text.push('\n');
    }
    env.write(name, &text)
}

fn c10_judge(env: &Env) -> Result<String, String> {
    let (m, url) = env.mock(15);
    let bound = 3;
    let cfg = judge_config(env, &url, "c10.json", bound);
    let records = unscored(env, "c10_records.jsonl", 30);
    let cache = env.dir("c10_cache.jsonl");
    let args = |out: &str| -> Vec<String> {
        ["--config", &cfg, "judge", "--records", &records, "--cache", &cache, "--out-dir", &env.dir(out)]
            .map(String::from)
            .to_vec()
    };
    let a = args("c10a");
    env.xfer_ok(&a.iter().map(String::as_str).collect::<Vec<_>>())?;
    let calls = m.chat_calls.load(Ordering::SeqCst);
    ensure(calls == 30, || format!("{calls} calls for 30 records"))?;

    let golden = fs::read(&env.golden_prompt).map_err(|e| e.to_string())?;
    let prompts = m.prompts.lock().unwrap().clone();
    let hit = prompts.iter().filter(|p| p.contains("Correct Answer: 42\n")).collect::<Vec<_>>();
    ensure(hit.len() == 1 && hit[0].as_bytes() == golden.as_slice(), || "42/42 prompt differs from the golden template".into())?;

    let b = args("c10b");
    env.xfer_ok(&b.iter().map(String::as_str).collect::<Vec<_>>())?;
    let after = m.chat_calls.load(Ordering::SeqCst);
    ensure(after == calls, || format!("rerun made {} more calls despite the cache", after - calls))?;

    let peak = m.peak_in_flight.load(Ordering::SeqCst);
    ensure(peak <= bound, || format!("peak in flight {peak} > {bound}"))?;
    Ok(format!("golden prompt matched; rerun served from cache; peak in flight {peak}/{bound}"))
}

/// Independent CoNLL-U reading: documents by `# newdoc id`, deprel in column 8.
fn conllu_deprels(text: &str) -> Vec<(String, BTreeSet<String>)> {
    let mut docs: Vec<(String, BTreeSet<String>)> = Vec::new();
    for line in text.lines() {
        if let Some(id) = line.strip_prefix("# newdoc id = ") {
            docs.push((id.trim().to_string(), BTreeSet::new()));
        } else if !line.starts_with('#') && !line.trim().is_empty() {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols[0].parse::<usize>().is_ok() {
                docs.last_mut().unwrap().1.insert(cols[7].to_string());
            }
        }
    }
    docs
}

fn scores(path: &Path) -> BTreeMap<String, u64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (v["example_id"].as_str().unwrap().to_string(), v["score"].as_u64().unwrap())
        })
        .collect()
}

fn c11_relation_importance(env: &Env) -> Result<String, String> {
    let conllu = env.data("lingfeat/problems.conllu");
    let base = env.data("lingfeat/base_records.jsonl");
    let adapter = env.data("lingfeat/adapter_records.jsonl");
    env.xfer_ok(&["lingfeat", "--base", &base, "--adapter", &adapter, "--conllu", &conllu, "--out-dir", &env.dir("c11")])?;
    let got = env.json("c11/lingfeat.json")?["relations"]["rows"].clone();

    let docs = conllu_deprels(&fs::read_to_string(&conllu).unwrap());
    ensure(docs.len() == 10, || format!("{} problems in fixture", docs.len()))?;
    let (bs, as_) = (scores(Path::new(&base)), scores(Path::new(&adapter)));
    let all: BTreeSet<&String> = docs.iter().flat_map(|(_, d)| d).collect();
    let mut want = serde_json::Map::new();
    let mut undefined = 0;
    for rel in all {
        let (mut a, mut b) = (0u64, 0u64);
        for (id, d) in &docs {
            if d.contains(rel) {
                a += as_[id];
                b += bs[id];
            }
        }
        let ratio = if b == 0 { Value::Null } else { json!(a as f64 / b as f64) };
        undefined += usize::from(b == 0);
        want.insert(
            rel.clone(),
            json!({"adapter_success_count": a, "base_success_count": b, "ratio": ratio, "defined": b > 0}),
        );
    }
    ensure(got == Value::Object(want.clone()), || format!("table differs from tally:\n got {got}\nwant {}", Value::Object(want)))?;
    Ok(format!("{} relations equal the tally, {undefined} flagged undefined", got.as_object().unwrap().len()))
}

fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn c12_determinism(env: &Env) -> Result<String, String> {
    let (_m, url) = env.mock(0);
    let cfg = json!({
        "judge": {"base_url": url, "model": "judge-model", "backoff_ms": 5},
        "embeddings": {"base_url": url, "model": "embed-model", "backoff_ms": 5},
    });
    let cfg = env.write("c12.json", &cfg.to_string());
    let records = unscored(env, "c12_unscored.jsonl", 12);

    let mut scored = String::new();
    for (model, base) in [("None", 0.4), ("A", 0.7)] {
        for (task, shift) in [("x", 0.0), ("y", 0.2)] {
            for e in 0..20 {
                let score = u8::from((e as f64 / 20.0) < base - shift);
                let r = json!({"model_id": model, "task_id": task, "example_id": e.to_string(), "prediction": "p", "gold": "g", "score": score});
                scored.push_str(&format!("{r}\n"));
            }
        }
    }
    let scored = env.write("c12_scored.jsonl", &scored);

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut embed = |name: &str, n: usize, shift: f64| {
        let text: String = (0..n)
            .map(|i| {
                let v: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0) + shift).collect();
                format!("{}\n", json!({"id": format!("{name}{i}"), "vector": v}))
            })
            .collect();
        env.write(&format!("c12_{name}.jsonl"), &text)
    };
    let (e1, e2) = (embed("a", 40, 0.5), embed("b", 30, -0.2));

    let mut preds = String::new();
    let fk = fs::read_to_string(env.data("flipkart_fixture.jsonl")).unwrap();
    for (i, line) in fk.lines().enumerate().take(300) {
        let v: Value = serde_json::from_str(line).unwrap();
        let gold = v["label"].as_str().unwrap();
        let pred = if i % 7 == 0 { "negative" } else if i % 11 == 0 { "unsure" } else { gold };
        preds.push_str(&format!("{}\n", json!({"prediction": pred, "gold": gold, "text": v["text"]})));
    }
    let preds = env.write("c12_preds.jsonl", &preds);
    let texts: String = (0..50).map(|i| format!("{}\n", json!({"id": format!("t{i}"), "text": format!("Question {i} has {} words", i % 9)}))).collect();
    let texts = env.write("c12_texts.jsonl", &texts);

    let d = |rel: &str| env.data(rel);
    let runs: Vec<(&str, Vec<String>)> = vec![
        ("aggregate", vec!["aggregate".into(), "--records".into(), scored]),
        ("pca", vec!["pca".into(), "--matrix".into(), d("reference_matrix.csv"), "--orient".into(), "0:GSM8K".into()]),
        (
            "transfer",
            vec![
                "transfer".into(),
                "--matrix".into(),
                d("reference_matrix.csv"),
                "--aliases".into(),
                d("aliases.json"),
                "--diff".into(),
                "Amazon,IMDB".into(),
            ],
        ),
        ("profile", vec!["profile".into(), "--dataset".into(), d("flipkart_fixture.jsonl")]),
        ("rebalance", vec!["rebalance".into(), "--dataset".into(), d("flipkart_fixture.jsonl"), "--target".into(), "negative:0.5".into()]),
        ("confusion", vec!["confusion".into(), "--predictions".into(), preds, "--labels".into(), "negative,neutral,positive".into()]),
        ("similarity", vec!["similarity".into(), "--set".into(), format!("A={e1}"), "--set".into(), format!("B={e2}"), "--cap".into(), "25".into()]),
        (
            "similarity-texts",
            vec!["--config".into(), cfg.clone(), "similarity".into(), "--texts".into(), format!("fk={}", d("flipkart_fixture.jsonl")), "--texts".into(), format!("q={texts}")],
        ),
        (
            "lingfeat",
            vec![
                "lingfeat".into(),
                "--base".into(),
                d("lingfeat/base_records.jsonl"),
                "--adapter".into(),
                d("lingfeat/adapter_records.jsonl"),
                "--conllu".into(),
                d("lingfeat/problems.conllu"),
                "--problems".into(),
                d("lingfeat/problems.jsonl"),
            ],
        ),
        ("judge", vec!["--config".into(), cfg.clone(), "judge".into(), "--records".into(), records]),
        ("report", vec!["report".into(), "--from".into(), env.dir("c12-pca-1/pca.json"), "--from".into(), env.dir("c12-confusion-1/confusion.json")]),
    ];

    let mut files = 0;
    for (name, args) in &runs {
        let mut trees = Vec::new();
        for rep in 1..=2 {
            let out = env.dir(&format!("c12-{name}-{rep}"));
            let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
            full.extend(["--out-dir", &out, "--seed", "5"]);
            env.xfer_ok(&full)?;
            trees.push(tree(Path::new(&out)));
        }
        ensure(!trees[0].is_empty(), || format!("{name} wrote nothing"))?;
        ensure(trees[0].keys().any(|p| p.ends_with("manifest.json")), || format!("{name} wrote no manifest"))?;
        for (p, bytes) in &trees[0] {
            ensure(trees[1].get(p) == Some(bytes), || format!("{name}: {} differs between runs", p.display()))?;
        }
        ensure(trees[0].len() == trees[1].len(), || format!("{name}: file sets differ"))?;
        files += trees[0].len();
    }
    Ok(format!("{} runs, {files} artifacts byte-identical on rerun", runs.len()))
}

fn main() -> ExitCode {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let env = Env {
        bin: PathBuf::from(env!("CARGO_BIN_EXE_xfer")),
        data: manifest.join("../core/data"),
        golden_prompt: manifest.join("../client/tests/golden/judge_42_42.txt"),
        tmp: tempfile::tempdir().expect("tempdir"),
        rt: tokio::runtime::Runtime::new().expect("runtime"),
    };
    let criteria: [(u32, &str, Check); 12] = [
        (1, "PCA variance", c1_pca_variance),
        (2, "PC0 trait group", c2_pc0_group),
        (3, "gain reproduction", c3_gains),
        (4, "row diff", c4_row_diff),
        (5, "class profile", c5_class_profile),
        (6, "PCA numerics", c6_pca_numerics),
        (7, "KDE oracle", c7_kde),
        (8, "KS oracle", c8_ks),
        (9, "rebalance", c9_rebalance),
        (10, "judge client", c10_judge),
        (11, "relation importance", c11_relation_importance),
        (12, "end-to-end determinism", c12_determinism),
    ];

    let mut bad = 0;
    for (n, name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(|| check(&env))).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == n).map(|(_, why)| *why);
        match (&result, known) {
            (Ok(detail), None) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            (Err(detail), Some(why)) => println!("criterion {n:>2} FAIL  {name}: {detail} [known: {why}]"),
            (Err(detail), None) => {
                bad += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail}");
            }
            (Ok(detail), Some(_)) => {
                bad += 1;
                println!("criterion {n:>2} PASS  {name}: {detail} [listed as a known failure; update KNOWN_FAILURES]");
            }
        }
    }
    if bad == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
