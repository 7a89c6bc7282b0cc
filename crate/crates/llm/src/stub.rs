//! A local OpenAI-compatible chat server with canned, deterministic replies.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::oneshot;

use crate::prompts::REFUSAL_SENTINEL;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StubBehavior {
    /// Label, summary and chat replies derived from the prompt text.
    Scripted,
    Fixed(String),
    Status(u16),
    /// Sleeps, then answers as `Scripted`.
    Delay(Duration),
    Empty,
}

#[derive(Debug)]
pub struct StubState {
    behavior: Mutex<StubBehavior>,
    calls: AtomicUsize,
    bodies: Mutex<Vec<Value>>,
}

impl StubState {
    pub fn new(behavior: StubBehavior) -> Arc<Self> {
        Arc::new(Self { behavior: Mutex::new(behavior), calls: AtomicUsize::new(0), bodies: Mutex::new(Vec::new()) })
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn bodies(&self) -> Vec<Value> {
        self.bodies.lock().unwrap().clone()
    }

    pub fn set_behavior(&self, b: StubBehavior) {
        *self.behavior.lock().unwrap() = b;
    }
}

fn title_case(word: &str) -> String {
    let mut cs = word.chars();
    match cs.next() {
        Some(c) => c.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

fn label_reply(user: &str) -> String {
    let first_row = user
        .split_once("Top words over time: ")
        .map(|(_, rest)| rest.lines().next().unwrap_or(""))
        .unwrap_or("");
    let words = first_row.split_once(": ").map(|(_, w)| w).unwrap_or(first_row);
    let picked: Vec<String> = words
        .split(", ")
        .filter(|w| !w.is_empty())
        .take(3)
        .map(|w| w.split('_').map(title_case).collect::<Vec<_>>().join(" "))
        .collect();
    if picked.is_empty() {
        "Unlabeled Topic".into()
    } else {
        picked.join(" ")
    }
}

fn documents(text: &str) -> Vec<String> {
    let mut docs: Vec<String> = Vec::new();
    for line in text.lines() {
        let line = line.strip_prefix("Documents: ").unwrap_or(line);
        if line == "Summary:" {
            break;
        }
        if line.starts_with("Document ") && line.ends_with(':') {
            docs.push(String::new());
        } else if let Some(d) = docs.last_mut() {
            if line.starts_with("User Question: ") {
                break;
            }
            if !line.is_empty() {
                if !d.is_empty() {
                    d.push(' ');
                }
                d.push_str(line);
            }
        }
    }
    docs
}

fn summary_reply(user: &str) -> String {
    let docs = documents(user);
    let n = docs.len();
    docs.iter()
        .take(5)
        .enumerate()
        .map(|(i, d)| {
            let gist: Vec<&str> = d.split_whitespace().take(8).collect();
            format!("- Theme {} of {n}: {}", i + 1, gist.join(" "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn chat_reply(system: &str, question: &str) -> String {
    let keys: Vec<String> = question
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| w.chars().count() >= 4)
        .map(str::to_lowercase)
        .collect();
    for (i, doc) in documents(system).iter().enumerate() {
        let lower = doc.to_lowercase();
        if keys.iter().any(|k| lower.contains(k.as_str())) {
            let sentence = doc.split_inclusive(['.', '!', '?']).next().unwrap_or(doc).trim();
            return format!("According to document {}: {sentence}", i + 1);
        }
    }
    REFUSAL_SENTINEL.to_string()
}

/// The reply the scripted stub gives for a request body.
pub fn scripted_reply(body: &Value) -> String {
    let messages = body["messages"].as_array().cloned().unwrap_or_default();
    let text_of = |role: &str| {
        messages
            .iter()
            .rev()
            .find(|m| m["role"] == role)
            .and_then(|m| m["content"].as_str())
            .unwrap_or("")
            .to_string()
    };
    let (user, system) = (text_of("user"), text_of("system"));
    if user.contains("Return ONLY the label") {
        label_reply(&user)
    } else if user.contains("Return no more than 5-7 bullets.") {
        summary_reply(&user)
    } else if !system.is_empty() {
        chat_reply(&system, &user)
    } else {
        "ok".into()
    }
}

fn completion(text: &str) -> Response {
    Json(json!({
        "id": "stub",
        "object": "chat.completion",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}]
    }))
    .into_response()
}

async fn handle(State(state): State<Arc<StubState>>, Json(body): Json<Value>) -> Response {
    state.calls.fetch_add(1, Ordering::SeqCst);
    state.bodies.lock().unwrap().push(body.clone());
    let behavior = state.behavior.lock().unwrap().clone();
    match behavior {
        StubBehavior::Scripted => completion(&scripted_reply(&body)),
        StubBehavior::Fixed(text) => completion(&text),
        StubBehavior::Status(code) => {
            let status = StatusCode::from_u16(code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            (status, Json(json!({"error": {"message": "stub failure"}}))).into_response()
        }
        StubBehavior::Delay(d) => {
            tokio::time::sleep(d).await;
            completion(&scripted_reply(&body))
        }
        StubBehavior::Empty => completion(""),
    }
}

pub fn router(state: Arc<StubState>) -> Router {
    Router::new()
        .route("/v1/chat/completions", post(handle))
        .route("/chat/completions", post(handle))
        .with_state(state)
}

/// Serves the stub on `listener` until `shutdown` resolves.
pub async fn serve_until(
    listener: TcpListener,
    state: Arc<StubState>,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await
}

/// A stub running on a background task until dropped.
#[derive(Debug)]
pub struct StubServer {
    addr: SocketAddr,
    state: Arc<StubState>,
    shutdown: Option<oneshot::Sender<()>>,
}

impl StubServer {
    /// Binds an ephemeral port on 127.0.0.1.
    pub async fn spawn(behavior: StubBehavior) -> std::io::Result<Self> {
        Self::spawn_on("127.0.0.1:0".parse().unwrap(), behavior).await
    }

    pub async fn spawn_on(addr: SocketAddr, behavior: StubBehavior) -> std::io::Result<Self> {
        let listener = TcpListener::bind(addr).await?;
        let addr = listener.local_addr()?;
        let state = StubState::new(behavior);
        let (tx, rx) = oneshot::channel::<()>();
        tokio::spawn(serve_until(listener, state.clone(), async {
            let _ = rx.await;
        }));
        Ok(Self { addr, state, shutdown: Some(tx) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}/v1", self.addr)
    }

    pub fn state(&self) -> &Arc<StubState> {
        &self.state
    }

    pub fn calls(&self) -> usize {
        self.state.calls()
    }

    pub fn set_behavior(&self, b: StubBehavior) {
        self.state.set_behavior(b);
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
    }
}
