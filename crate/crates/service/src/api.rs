use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::Json;
use serde::{Deserialize, Serialize};
use topicscope_core::retrieval::RetrieveParams;
use topicscope_core::saliency::{rank_salient, SaliencyConfig};
use topicscope_core::Quality;

use crate::error::ApiError;
use crate::state::SharedState;

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Serialize)]
pub struct Meta {
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "V")]
    pub v: usize,
    pub docs: usize,
    pub model_name: String,
    pub timestamps: Vec<String>,
    pub top_n: usize,
}

#[derive(Debug, Serialize)]
pub struct TimeWords {
    pub time: usize,
    pub timestamp: String,
    pub words: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct TopicSummary {
    pub id: usize,
    pub label: Option<String>,
    pub top_words: Vec<TimeWords>,
}

#[derive(Debug, Serialize)]
pub struct Topics {
    pub topics: Vec<TopicSummary>,
}

#[derive(Debug, Serialize)]
pub struct Label {
    pub id: usize,
    pub label: String,
    pub cached: bool,
}

#[derive(Debug, Serialize)]
pub struct SalientWord {
    pub id: usize,
    pub word: String,
    pub s_burst: f64,
    pub s_spec: f64,
    pub s_uniq: f64,
    pub s_final: f64,
}

#[derive(Debug, Serialize)]
pub struct Salient {
    pub topic: usize,
    pub pool: usize,
    pub words: Vec<SalientWord>,
}

#[derive(Debug, Serialize)]
pub struct Series {
    pub word: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Trend {
    pub topic: usize,
    pub timestamps: Vec<String>,
    pub series: Vec<Series>,
}

#[derive(Debug, Serialize)]
pub struct Hit {
    pub doc_id: String,
    pub relevance: f64,
    pub text: String,
    pub highlights: Vec<[usize; 2]>,
}

#[derive(Debug, Serialize)]
pub struct Retrieved {
    pub word: String,
    pub time: usize,
    pub timestamp: String,
    pub results: Vec<Hit>,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub word: String,
    pub time: usize,
    pub timestamp: String,
    pub doc_ids: Vec<String>,
    pub summary: String,
    pub bullets: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub doc_ids: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ChatReply {
    pub session_id: String,
    pub reply: String,
    pub turn: usize,
}

#[derive(Debug, Default, Deserialize)]
pub struct SalientQuery {
    pub pool: Option<usize>,
    pub limit: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
pub struct TrendQuery {
    pub words: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
pub struct RetrieveQuery {
    pub word: Option<String>,
    pub time: Option<usize>,
    pub limit: Option<usize>,
    pub lambda: Option<f64>,
    pub candidates: Option<usize>,
}

#[derive(Debug, Deserialize)]
pub struct SummarizeBody {
    pub word: String,
    pub time: usize,
    #[serde(default)]
    pub doc_ids: Option<Vec<String>>,
    #[serde(default)]
    pub words: Option<Vec<String>>,
    #[serde(default)]
    pub limit: Option<usize>,
    #[serde(default)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Deserialize)]
pub struct SessionBody {
    #[serde(default)]
    pub word: Option<String>,
    #[serde(default)]
    pub time: Option<usize>,
    #[serde(default)]
    pub doc_ids: Option<Vec<String>>,
    #[serde(default)]
    pub summary: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct ChatBody {
    pub message: String,
}

fn check_topic(s: &SharedState, k: usize) -> Result<(), ApiError> {
    Ok(s.beta.check_topic(k)?)
}

fn timestamp(s: &SharedState, t: usize) -> Result<String, ApiError> {
    s.retriever
        .corpus
        .timestamps
        .get(t)
        .cloned()
        .ok_or_else(|| ApiError::not_found("unknown_time", format!("time index {t} out of range")))
}

fn params(s: &SharedState, limit: Option<usize>, lambda: Option<f64>, candidates: Option<usize>) -> RetrieveParams<f64> {
    let d = s.config.retrieve;
    RetrieveParams {
        limit: limit.unwrap_or(d.limit),
        lambda: lambda.unwrap_or(d.lambda),
        candidates: candidates.unwrap_or(d.candidates),
        query: d.query,
    }
}

/// Bullet lines of a summary with their markers removed.
pub fn bullets(summary: &str) -> Vec<String> {
    summary
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let l = l.trim_start_matches(['-', '*', '\u{2022}']);
            let digits = l.len() - l.trim_start_matches(|c: char| c.is_ascii_digit()).len();
            let l = if digits > 0 && l[digits..].starts_with(['.', ')']) { &l[digits + 1..] } else { l };
            l.trim().to_string()
        })
        .filter(|l| !l.is_empty())
        .collect()
}

/// Resolves explicit ids, or retrieves for `(word, time)`.
fn context_docs(
    s: &SharedState,
    doc_ids: Option<Vec<String>>,
    word: Option<&str>,
    time: Option<usize>,
    p: &RetrieveParams<f64>,
) -> Result<(Vec<String>, Vec<String>), ApiError> {
    let ids = match (doc_ids, word, time) {
        (Some(ids), _, _) => ids,
        (None, Some(w), Some(t)) => {
            timestamp(s, t)?;
            s.retriever.retrieve(w, t, p)?.into_iter().map(|r| r.doc_id).collect()
        }
        _ => return Err(ApiError::bad_request("give doc_ids, or word and time")),
    };
    let texts = ids
        .iter()
        .map(|id| {
            s.retriever
                .doc_text(id)
                .map(str::to_string)
                .ok_or_else(|| ApiError::bad_request(format!("unknown document `{id}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((ids, texts))
}

pub async fn meta(State(s): State<SharedState>) -> Json<Meta> {
    Json(Meta {
        t: s.beta.num_times(),
        k: s.beta.num_topics(),
        v: s.beta.vocab_size(),
        docs: s.retriever.corpus.num_docs(),
        model_name: s.beta.model_name.clone(),
        timestamps: s.beta.timestamps.clone(),
        top_n: s.config.top_n,
    })
}

pub async fn topics(State(s): State<SharedState>) -> ApiResult<Topics> {
    let mut out = Vec::with_capacity(s.beta.num_topics());
    for k in 0..s.beta.num_topics() {
        let traj = s.trajectory(k)?;
        let label = s.llm.cached_label(&traj)?;
        let top_words = traj
            .rows
            .into_iter()
            .enumerate()
            .map(|(time, (timestamp, words))| TimeWords { time, timestamp, words })
            .collect();
        out.push(TopicSummary { id: k, label, top_words });
    }
    Ok(Json(Topics { topics: out }))
}

pub async fn label(State(s): State<SharedState>, k: Result<Path<usize>, PathRejection>) -> ApiResult<Label> {
    let Path(k) = k?;
    check_topic(&s, k)?;
    let traj = s.trajectory(k)?;
    if let Some(label) = s.llm.cached_label(&traj)? {
        return Ok(Json(Label { id: k, label, cached: true }));
    }
    let label = s.llm.label_topic(&traj).await?;
    Ok(Json(Label { id: k, label, cached: false }))
}

pub async fn salient(
    State(s): State<SharedState>,
    k: Result<Path<usize>, PathRejection>,
    q: Result<Query<SalientQuery>, QueryRejection>,
) -> ApiResult<Salient> {
    let Path(k) = k?;
    let Query(q) = q?;
    check_topic(&s, k)?;
    let cfg = SaliencyConfig { pool_size: q.pool.unwrap_or(s.config.saliency.pool_size), ..s.config.saliency };
    if cfg.pool_size == 0 {
        return Err(ApiError::bad_request("pool must be >= 1"));
    }
    let ranked = rank_salient(&s.beta, k, &cfg, q.limit.unwrap_or(10))?;
    let words = ranked
        .into_iter()
        .map(|r| SalientWord {
            id: r.word,
            word: s.beta.vocab[r.word].clone(),
            s_burst: r.s_burst,
            s_spec: r.s_spec,
            s_uniq: r.s_uniq,
            s_final: r.s_final,
        })
        .collect();
    Ok(Json(Salient { topic: k, pool: cfg.pool_size, words }))
}

pub async fn trend(
    State(s): State<SharedState>,
    k: Result<Path<usize>, PathRejection>,
    q: Result<Query<TrendQuery>, QueryRejection>,
) -> ApiResult<Trend> {
    let Path(k) = k?;
    let Query(q) = q?;
    check_topic(&s, k)?;
    let words: Vec<&str> = q.words.as_deref().unwrap_or("").split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
    if words.is_empty() {
        return Err(ApiError::bad_request("words must list at least one term"));
    }
    let series = words
        .into_iter()
        .map(|w| {
            let v = s.beta.word_id(w).ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "unknown_word", format!("unknown word `{w}`")))?;
            Ok(Series { word: w.to_string(), values: s.beta.trajectory(k, v)?.series })
        })
        .collect::<Result<Vec<_>, ApiError>>()?;
    Ok(Json(Trend { topic: k, timestamps: s.beta.timestamps.clone(), series }))
}

pub async fn metrics(State(s): State<SharedState>) -> Json<Quality> {
    Json(s.quality.clone())
}

pub async fn retrieve(State(s): State<SharedState>, q: Result<Query<RetrieveQuery>, QueryRejection>) -> ApiResult<Retrieved> {
    let Query(q) = q?;
    let word = q.word.filter(|w| !w.trim().is_empty()).ok_or_else(|| ApiError::bad_request("word is required"))?;
    let time = q.time.ok_or_else(|| ApiError::bad_request("time is required"))?;
    let ts = timestamp(&s, time)?;
    let p = params(&s, q.limit, q.lambda, q.candidates);
    let word = word.trim().to_lowercase();
    let results = s
        .retriever
        .retrieve(&word, time, &p)?
        .into_iter()
        .map(|r| Hit {
            text: s.retriever.doc_text(&r.doc_id).unwrap_or_default().to_string(),
            doc_id: r.doc_id,
            relevance: r.relevance,
            highlights: r.highlights.into_iter().map(|(a, b)| [a, b]).collect(),
        })
        .collect();
    Ok(Json(Retrieved { word, time, timestamp: ts, results }))
}

pub async fn summarize(State(s): State<SharedState>, body: Result<Json<SummarizeBody>, JsonRejection>) -> ApiResult<Summary> {
    let Json(b) = body?;
    let ts = timestamp(&s, b.time)?;
    let p = params(&s, b.limit, b.lambda, None);
    let (doc_ids, texts) = context_docs(&s, b.doc_ids, Some(&b.word), Some(b.time), &p)?;
    let words = b.words.filter(|w| !w.is_empty()).unwrap_or_else(|| vec![b.word.clone()]);
    let summary = s.llm.summarize(&texts, &words, &ts).await?;
    Ok(Json(Summary { bullets: bullets(&summary), word: b.word, time: b.time, timestamp: ts, doc_ids, summary }))
}

pub async fn create_session(
    State(s): State<SharedState>,
    body: Result<Json<SessionBody>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let Json(b) = body?;
    let p = s.config.retrieve;
    let (doc_ids, texts) = context_docs(&s, b.doc_ids, b.word.as_deref(), b.time, &p)?;
    if texts.is_empty() {
        return Err(ApiError::bad_request("a session needs at least one document"));
    }
    let session_id = s.sessions.create(texts, b.summary);
    Ok((StatusCode::CREATED, Json(SessionCreated { session_id, doc_ids })))
}

pub async fn chat(
    State(s): State<SharedState>,
    id: Result<Path<String>, PathRejection>,
    body: Result<Json<ChatBody>, JsonRejection>,
) -> ApiResult<ChatReply> {
    let Path(id) = id?;
    let Json(b) = body?;
    let session = s
        .sessions
        .get(&id)
        .ok_or_else(|| ApiError::not_found("unknown_session", format!("no session `{id}`")))?;
    if b.message.trim().is_empty() {
        return Err(ApiError::bad_request("message must not be empty"));
    }
    let mut session = session.lock().await;
    let reply = s.llm.chat_reply(&mut session, b.message.trim()).await?;
    let turn = session.history.len() / 2 - 1;
    Ok(Json(ChatReply { session_id: id, reply, turn }))
}
