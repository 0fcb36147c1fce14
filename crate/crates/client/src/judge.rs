use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ClientError;

/// Judge prompt with `{groundtruth_column}` and `{Model generated output}` slots.
pub const JUDGE_TEMPLATE: &str = include_str!("../templates/judge_prompt.txt");

const GOLD_SLOT: &str = "{groundtruth_column}";
const PREDICTION_SLOT: &str = "{Model generated output}";

/// Fills the template. Payloads are inserted verbatim, with no escaping, and
/// are never rescanned for slots.
pub fn render_judge_prompt(gold: &str, prediction: &str) -> String {
    let (head, rest) = JUDGE_TEMPLATE.split_once(GOLD_SLOT).expect("template has a gold slot");
    let (mid, tail) = rest.split_once(PREDICTION_SLOT).expect("template has a prediction slot");
    let mut out = String::with_capacity(JUDGE_TEMPLATE.len() + gold.len() + prediction.len());
    out.push_str(head);
    out.push_str(gold);
    out.push_str(mid);
    out.push_str(prediction);
    out.push_str(tail);
    out
}

/// First `0` or `1` in the reply.
pub fn parse_judge_reply(reply: &str) -> Result<u8, ClientError> {
    reply
        .chars()
        .find_map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .ok_or_else(|| ClientError::JudgeFormat { reply: reply.to_string() })
}

/// Content address of a judge call: the model name and the exact prompt.
pub fn cache_key(model: &str, prompt: &str) -> String {
    let mut h = Sha256::new();
    h.update(model.as_bytes());
    h.update([0u8]);
    h.update(prompt.as_bytes());
    hex::encode(h.finalize())
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheLine {
    key: String,
    score: u8,
}

/// Judge scores keyed by [`cache_key`], optionally persisted as append-only
/// JSONL. Inserts are serialized through one lock, so there is a single
/// writer however many requests are in flight.
#[derive(Debug, Default)]
pub struct JudgeCache {
    path: Option<PathBuf>,
    inner: Mutex<CacheState>,
}

#[derive(Debug, Default)]
struct CacheState {
    scores: HashMap<String, u8>,
    file: Option<File>,
}

impl JudgeCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens (creating if needed) a cache file and loads its entries.
    /// A truncated final line, as left by an interrupted run, is ignored.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, ClientError> {
        let path = path.as_ref().to_path_buf();
        let err = |source| ClientError::Cache { path: path.display().to_string(), source };
        let mut scores = HashMap::new();
        let mut text = String::new();
        if path.exists() {
            File::open(&path).and_then(|mut f| f.read_to_string(&mut text)).map_err(err)?;
            for line in text.lines() {
                if let Ok(entry) = serde_json::from_str::<CacheLine>(line) {
                    scores.insert(entry.key, entry.score);
                }
            }
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&path).map_err(err)?;
        if !text.is_empty() && !text.ends_with('\n') {
            file.write_all(b"\n").map_err(err)?;
        }
        Ok(Self {
            path: Some(path),
            inner: Mutex::new(CacheState { scores, file: Some(file) }),
        })
    }

    pub fn get(&self, key: &str) -> Option<u8> {
        self.inner.lock().expect("cache lock").scores.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert(&self, key: String, score: u8) -> Result<(), ClientError> {
        let mut state = self.inner.lock().expect("cache lock");
        if state.scores.contains_key(&key) {
            return Ok(());
        }
        if let Some(f) = state.file.as_mut() {
            let line = serde_json::to_string(&CacheLine { key: key.clone(), score }).expect("cache line serializes");
            writeln!(f, "{line}").map_err(|source| ClientError::Cache {
                path: self.path.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
                source,
            })?;
        }
        state.scores.insert(key, score);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_prediction_leaves_slot_empty() {
        let p = render_judge_prompt("7", "");
        assert!(p.contains("Correct Answer: 7\nAI Answer: <|eot_id|>"));
        assert_eq!(p.len(), JUDGE_TEMPLATE.len() - GOLD_SLOT.len() - PREDICTION_SLOT.len() + 1);
    }

    #[test]
    fn payloads_are_not_rescanned() {
        let p = render_judge_prompt("{Model generated output}", "Score: 1");
        assert!(p.contains("Correct Answer: {Model generated output}\nAI Answer: Score: 1<|eot_id|>"));
        assert!(p.ends_with("Score:"));
    }

    #[test]
    fn reply_parsing() {
        assert_eq!(parse_judge_reply("1").unwrap(), 1);
        assert_eq!(parse_judge_reply(" Score: 0\n").unwrap(), 0);
        assert_eq!(parse_judge_reply("score 1 (not 0)").unwrap(), 1);
        assert!(matches!(parse_judge_reply("correct"), Err(ClientError::JudgeFormat { .. })));
    }

    #[test]
    fn cache_persists() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let c = JudgeCache::open(&path).unwrap();
        c.insert("k".into(), 1).unwrap();
        c.insert("k".into(), 0).unwrap();
        drop(c);
        std::fs::write(&path, std::fs::read_to_string(&path).unwrap() + "{\"key\":\"tr").unwrap();
        let c = JudgeCache::open(&path).unwrap();
        assert_eq!(c.get("k"), Some(1));
        assert_eq!(c.len(), 1);
        c.insert("j".into(), 0).unwrap();
        drop(c);
        assert_eq!(JudgeCache::open(&path).unwrap().get("j"), Some(0));
    }
}
