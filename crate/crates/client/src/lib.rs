//! Client for OpenAI-compatible endpoints: LLM-as-judge scoring and text
//! embeddings.
//!
//! Requests go through a bounded in-flight pool with exponential-backoff
//! retries. Judge scores are cached by content hash so reruns and duplicate
//! items never hit the network twice.

mod client;
mod config;
mod error;
mod judge;

pub use client::Client;
pub use config::{EndpointConfig, DEFAULT_BATCH_SIZE, TEMPERATURE};
pub use error::ClientError;
pub use judge::{cache_key, parse_judge_reply, render_judge_prompt, JudgeCache, JUDGE_TEMPLATE};
