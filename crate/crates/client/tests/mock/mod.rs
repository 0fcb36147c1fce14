//! In-process stand-in for an OpenAI-compatible server.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};

#[derive(Default)]
pub struct Mock {
    pub chat_calls: AtomicUsize,
    pub embed_calls: AtomicUsize,
    in_flight: AtomicUsize,
    pub peak_in_flight: AtomicUsize,
    /// Number of upcoming requests answered with HTTP 500.
    pub fail_next: AtomicUsize,
    pub delay_ms: u64,
    pub prompts: Mutex<Vec<String>>,
    pub bodies: Mutex<Vec<Value>>,
    pub batch_sizes: Mutex<Vec<usize>>,
}

impl Mock {
    pub fn with_delay(delay_ms: u64) -> Self {
        Self { delay_ms, ..Self::default() }
    }
}

struct Guard<'a>(&'a Mock);

impl<'a> Guard<'a> {
    fn enter(m: &'a Mock) -> Self {
        let now = m.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
        m.peak_in_flight.fetch_max(now, Ordering::SeqCst);
        Guard(m)
    }
}

impl Drop for Guard<'_> {
    fn drop(&mut self) {
        self.0.in_flight.fetch_sub(1, Ordering::SeqCst);
    }
}

fn take_failure(m: &Mock) -> bool {
    m.fail_next.fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1)).is_ok()
}

/// Replies with the gold answer's parity unless the prediction says POISON.
async fn chat(State(m): State<Arc<Mock>>, Json(body): Json<Value>) -> (StatusCode, Json<Value>) {
    let _g = Guard::enter(&m);
    m.chat_calls.fetch_add(1, Ordering::SeqCst);
    tokio::time::sleep(Duration::from_millis(m.delay_ms)).await;
    if take_failure(&m) {
        return (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({"error": "busy"})));
    }
    let prompt = body["messages"][0]["content"].as_str().unwrap_or_default().to_string();
    m.prompts.lock().unwrap().push(prompt.clone());
    m.bodies.lock().unwrap().push(body);
    let reply = if prompt.contains("POISON") {
        "I cannot tell".to_string()
    } else if prompt.contains("AI Answer: wrong") {
        " Score: 0\n".to_string()
    } else {
        " 1".to_string()
    };
    (StatusCode::OK, Json(json!({"choices": [{"message": {"role": "assistant", "content": reply}}]})))
}

/// Embeds each text as `[len, first byte, 1]`, listed in reverse index order.
async fn embeddings(State(m): State<Arc<Mock>>, Json(body): Json<Value>) -> (StatusCode, Json<Value>) {
    let _g = Guard::enter(&m);
    m.embed_calls.fetch_add(1, Ordering::SeqCst);
    tokio::time::sleep(Duration::from_millis(m.delay_ms)).await;
    if take_failure(&m) {
        return (StatusCode::SERVICE_UNAVAILABLE, Json(json!({})));
    }
    let input: Vec<String> = serde_json::from_value(body["input"].clone()).unwrap();
    m.batch_sizes.lock().unwrap().push(input.len());
    let data: Vec<Value> = input
        .iter()
        .enumerate()
        .rev()
        .map(|(i, t)| json!({"index": i, "embedding": [t.len() as f64, *t.as_bytes().first().unwrap_or(&0) as f64, 1.0]}))
        .collect();
    (StatusCode::OK, Json(json!({"data": data})))
}

/// Serves `mock` on an ephemeral port; returns the base URL.
pub async fn serve(mock: Arc<Mock>) -> String {
    let app = Router::new()
        .route("/v1/chat/completions", post(chat))
        .route("/v1/embeddings", post(embeddings))
        .with_state(mock);
    let listener = tokio::net::TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], 0))).await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    format!("http://{addr}/v1")
}
