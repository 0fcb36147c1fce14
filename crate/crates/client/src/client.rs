use std::sync::Arc;
use std::time::Duration;

use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::Semaphore;
use tokio::task::JoinSet;
use xfer::io::embedding::EmbeddingSet;
use xfer::io::records::{EvalRecord, UnscoredRecord};

use crate::config::{EndpointConfig, TEMPERATURE};
use crate::error::ClientError;
use crate::judge::{cache_key, parse_judge_reply, render_judge_prompt, JudgeCache};

/// Endpoint client. Cheap to clone; clones share the connection pool, the
/// in-flight limit and the score cache.
#[derive(Clone)]
pub struct Client {
    http: reqwest::Client,
    config: Arc<EndpointConfig>,
    token: Option<Arc<str>>,
    permits: Arc<Semaphore>,
    cache: Arc<JudgeCache>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: String,
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingItem>,
}

#[derive(Deserialize)]
struct EmbeddingItem {
    #[serde(default)]
    index: Option<usize>,
    embedding: Vec<f64>,
}

impl Client {
    pub fn new(config: EndpointConfig, cache: JudgeCache) -> Result<Self, ClientError> {
        config.validate()?;
        let token = config.token()?.map(Arc::from);
        let http = reqwest::Client::builder()
            .timeout(config.timeout())
            .build()
            .map_err(|e| ClientError::Config(e.to_string()))?;
        Ok(Self {
            http,
            permits: Arc::new(Semaphore::new(config.max_in_flight)),
            config: Arc::new(config),
            token,
            cache: Arc::new(cache),
        })
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    pub fn cache(&self) -> &JudgeCache {
        &self.cache
    }

    async fn post_once(&self, path: &str, body: &Value) -> Result<Value, ClientError> {
        let _permit = self.permits.acquire().await.expect("semaphore never closed");
        let mut req = self.http.post(self.config.url(path)).json(body);
        if let Some(t) = &self.token {
            req = req.bearer_auth(t);
        }
        let resp = req
            .send()
            .await
            .map_err(|e| ClientError::Transport { attempts: 1, message: e.to_string() })?;
        let status = resp.status();
        let text = resp
            .text()
            .await
            .map_err(|e| ClientError::Transport { attempts: 1, message: e.to_string() })?;
        if !status.is_success() {
            return Err(ClientError::Status { status: status.as_u16(), body: text });
        }
        serde_json::from_str(&text).map_err(|e| ClientError::Schema(format!("{path}: {e}")))
    }

    /// POSTs with exponential backoff on transport errors, 429 and 5xx.
    async fn post(&self, path: &str, body: &Value) -> Result<Value, ClientError> {
        let mut attempt = 0;
        loop {
            attempt += 1;
            match self.post_once(path, body).await {
                Ok(v) => return Ok(v),
                Err(e) if e.retryable() && attempt <= self.config.retries => {
                    let delay = self.config.backoff_ms.saturating_mul(1 << (attempt - 1).min(16));
                    tokio::time::sleep(Duration::from_millis(delay)).await;
                }
                Err(ClientError::Transport { message, .. }) => {
                    return Err(ClientError::Transport { attempts: attempt, message });
                }
                Err(e) => return Err(e),
            }
        }
    }

    /// Scores one prediction. Served from the cache when the same prompt was
    /// judged by the same model before.
    pub async fn judge(&self, gold: &str, prediction: &str) -> Result<u8, ClientError> {
        let prompt = render_judge_prompt(gold, prediction);
        let key = cache_key(&self.config.model, &prompt);
        if let Some(score) = self.cache.get(&key) {
            return Ok(score);
        }
        let body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": TEMPERATURE,
        });
        let value = self.post("chat/completions", &body).await?;
        let resp: ChatResponse =
            serde_json::from_value(value).map_err(|e| ClientError::Schema(format!("chat/completions: {e}")))?;
        let reply = resp
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| ClientError::Schema("chat/completions: no choices".into()))?
            .message
            .content;
        let score = parse_judge_reply(&reply)?;
        self.cache.insert(key, score)?;
        Ok(score)
    }

    /// Scores `(gold, prediction)` pairs concurrently; results keep input order
    /// and failures are reported per item.
    pub async fn judge_many(&self, items: &[(String, String)]) -> Vec<Result<u8, ClientError>> {
        let mut set = JoinSet::new();
        for (i, (gold, pred)) in items.iter().enumerate() {
            let client = self.clone();
            let (gold, pred) = (gold.clone(), pred.clone());
            set.spawn(async move { (i, client.judge(&gold, &pred).await) });
        }
        let mut out: Vec<Option<Result<u8, ClientError>>> = (0..items.len()).map(|_| None).collect();
        while let Some(joined) = set.join_next().await {
            let (i, r) = joined.expect("judge task panicked");
            out[i] = Some(r);
        }
        out.into_iter().map(|r| r.expect("every task reports")).collect()
    }

    /// Scores unscored records. Returns the scored records in input order and,
    /// separately, the records that could not be scored.
    pub async fn judge_records(&self, records: Vec<UnscoredRecord>) -> (Vec<EvalRecord>, Vec<(UnscoredRecord, ClientError)>) {
        let items: Vec<(String, String)> = records.iter().map(|r| (r.gold.clone(), r.prediction.clone())).collect();
        let results = self.judge_many(&items).await;
        let mut scored = Vec::new();
        let mut failed = Vec::new();
        for (rec, res) in records.into_iter().zip(results) {
            match res {
                Ok(s) => scored.push(rec.scored(s)),
                Err(e) => failed.push((rec, e)),
            }
        }
        (scored, failed)
    }

    async fn embed_batch(&self, texts: Vec<String>) -> Result<Vec<Vec<f64>>, ClientError> {
        let n = texts.len();
        let body = json!({ "model": self.config.model, "input": texts });
        let value = self.post("embeddings", &body).await?;
        let resp: EmbeddingResponse =
            serde_json::from_value(value).map_err(|e| ClientError::Schema(format!("embeddings: {e}")))?;
        if resp.data.len() != n {
            return Err(ClientError::Schema(format!("asked for {n} embeddings, got {}", resp.data.len())));
        }
        let mut slots: Vec<Option<Vec<f64>>> = vec![None; n];
        for (pos, item) in resp.data.into_iter().enumerate() {
            let i = item.index.unwrap_or(pos);
            match slots.get_mut(i) {
                Some(slot @ None) => *slot = Some(item.embedding),
                _ => return Err(ClientError::Schema(format!("embedding index {i} repeated or out of range"))),
            }
        }
        Ok(slots.into_iter().map(|s| s.expect("all slots filled")).collect())
    }

    /// Embeds `texts` in batches of `batch_size`. Ids are the input positions.
    pub async fn embed(&self, texts: &[String]) -> Result<EmbeddingSet, ClientError> {
        if texts.is_empty() {
            return Err(ClientError::Precondition("no texts to embed"));
        }
        let mut set = JoinSet::new();
        for (b, chunk) in texts.chunks(self.config.batch_size).enumerate() {
            let client = self.clone();
            let chunk = chunk.to_vec();
            set.spawn(async move { (b, client.embed_batch(chunk).await) });
        }
        let mut batches: Vec<Option<Vec<Vec<f64>>>> = vec![None; set.len()];
        while let Some(joined) = set.join_next().await {
            let (b, r) = joined.expect("embedding task panicked");
            batches[b] = Some(r?);
        }
        let vectors: Vec<Vec<f64>> = batches.into_iter().flat_map(|b| b.expect("every batch reports")).collect();
        let dim = vectors[0].len();
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(ClientError::Schema(format!("inconsistent embedding dims: {dim} and {}", v.len())));
        }
        let ids = (0..vectors.len()).map(|i| i.to_string()).collect();
        EmbeddingSet::new(ids, vectors).map_err(|e| ClientError::Schema(e.to_string()))
    }
}
