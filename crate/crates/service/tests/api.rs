use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::Value;
use topicscope_core::corpus::{preprocess_corpus, read_docs_jsonl, read_stopwords, IngestConfig};
use topicscope_core::retrieval::CacheStatus;
use topicscope_llm::{LlmSettings, ProviderSettings, StubBehavior, StubServer};
use topicscope_service::{schema, AppState, BoundService, ServiceConfig, StartupError};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/e2e")
}

fn processed(dir: &Path) {
    let f = fixture();
    let cfg = IngestConfig {
        stopwords: read_stopwords(&f.join("stopwords.txt")).unwrap(),
        min_count_bigram: 3,
        threshold_bigram: 1.0,
        min_doc_freq: Some(2),
        ..IngestConfig::default()
    };
    let docs = read_docs_jsonl(&f.join("docs.jsonl")).unwrap();
    preprocess_corpus(&docs, &cfg).unwrap().write(dir).unwrap();
}

struct Harness {
    base: String,
    http: reqwest::Client,
    stub: StubServer,
    _dir: tempfile::TempDir,
    _stop: tokio::sync::oneshot::Sender<()>,
}

fn config(corpus: &Path, stub: &StubServer, timeout: Duration) -> ServiceConfig {
    let mut cfg = ServiceConfig::new(corpus, fixture().join("model"));
    cfg.addr = "127.0.0.1:0".parse().unwrap();
    cfg.llm = LlmSettings {
        provider: ProviderSettings { base_url: stub.base_url(), api_key: None, model: "stub".into(), timeout },
        ..LlmSettings::default()
    };
    cfg
}

async fn start_with(behavior: StubBehavior, prelabel: bool, timeout: Duration) -> Harness {
    let stub = StubServer::spawn(behavior).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    processed(dir.path());
    let mut cfg = config(dir.path(), &stub, timeout);
    cfg.prelabel = prelabel;
    let bound = BoundService::bind(AppState::load(cfg).unwrap()).await.unwrap();
    let addr = bound.local_addr().unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    tokio::spawn(bound.run(async {
        let _ = rx.await;
    }));
    Harness { base: format!("http://{addr}"), http: reqwest::Client::new(), stub, _dir: dir, _stop: tx }
}

async fn start() -> Harness {
    start_with(StubBehavior::Scripted, false, Duration::from_secs(5)).await
}

fn assert_schema(name: &str, body: &Value) {
    let schema: Value = serde_json::from_str(schema::get(name).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    let errs: Vec<String> = v.iter_errors(body).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errs.is_empty(), "{name}: {errs:?}\n{body}");
}

impl Harness {
    async fn get(&self, path: &str) -> (u16, Value) {
        let r = self.http.get(format!("{}{path}", self.base)).send().await.unwrap();
        (r.status().as_u16(), r.json().await.unwrap())
    }

    async fn get_raw(&self, path: &str) -> String {
        self.http.get(format!("{}{path}", self.base)).send().await.unwrap().text().await.unwrap()
    }

    async fn post(&self, path: &str, body: Value) -> (u16, Value) {
        let r = self.http.post(format!("{}{path}", self.base)).json(&body).send().await.unwrap();
        (r.status().as_u16(), r.json().await.unwrap())
    }
}

#[tokio::test]
async fn read_endpoints_match_schemas_and_are_repeatable() {
    let h = start().await;
    let (s, meta) = h.get("/api/meta").await;
    assert_eq!(s, 200);
    assert_eq!((meta["T"].as_u64(), meta["K"].as_u64(), meta["V"].as_u64(), meta["docs"].as_u64()), (Some(3), Some(2), Some(40), Some(30)));
    assert_schema("meta", &meta);

    let cases = [
        ("/api/topics", "topics"),
        ("/api/topics/0/salient?pool=40&limit=5", "salient"),
        ("/api/topics/1/trend?words=upi,credit_card", "trend"),
        ("/api/metrics", "metrics"),
        ("/api/retrieve?word=rbi&time=0", "retrieve"),
    ];
    for (path, name) in cases {
        let (s, body) = h.get(path).await;
        assert_eq!(s, 200, "{path}: {body}");
        assert_schema(name, &body);
        assert_eq!(h.get_raw(path).await, h.get_raw(path).await, "{path} not repeatable");
    }
    // nothing above talks to the provider
    assert_eq!(h.stub.calls(), 0);
}

#[tokio::test]
async fn retrieve_contract() {
    let h = start().await;
    let (_, body) = h.get("/api/retrieve?word=rbi&time=0").await;
    let results = body["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    for r in results {
        let text = r["text"].as_str().unwrap();
        let spans = r["highlights"].as_array().unwrap();
        assert!(!spans.is_empty());
        for sp in spans {
            let (a, b) = (sp[0].as_u64().unwrap() as usize, sp[1].as_u64().unwrap() as usize);
            assert_eq!(text[a..b].to_lowercase(), "rbi");
        }
    }

    let (s, body) = h.get("/api/retrieve?word=zebra&time=0").await;
    assert_eq!((s, body["results"].as_array().unwrap().len()), (200, 0));

    for (path, status, code) in [
        ("/api/retrieve?word=rbi&time=99", 404, "unknown_time"),
        ("/api/retrieve?time=0", 400, "invalid_parameter"),
        ("/api/retrieve?word=rbi&time=zero", 400, "invalid_parameter"),
        ("/api/retrieve?word=rbi&time=0&lambda=1.5", 400, "invalid_parameter"),
        ("/api/topics/7/salient", 404, "unknown_topic"),
        ("/api/topics/0/trend?words=", 400, "invalid_parameter"),
        ("/api/topics/0/trend?words=zebra", 400, "unknown_word"),
    ] {
        let (s, body) = h.get(path).await;
        assert_eq!(s, status, "{path}: {body}");
        assert_eq!(body["error"]["code"], code, "{path}");
        assert_schema("error", &body);
    }
}

#[tokio::test]
async fn labels_are_cached_and_listed() {
    let h = start().await;
    let (_, topics) = h.get("/api/topics").await;
    assert!(topics["topics"].as_array().unwrap().iter().all(|t| t["label"].is_null()));

    let (s, label) = h.post("/api/topics/0/label", Value::Null).await;
    assert_eq!(s, 200, "{label}");
    assert_schema("label", &label);
    assert_eq!(label["cached"], false);
    assert_eq!(h.stub.calls(), 1);

    let (_, again) = h.post("/api/topics/0/label", Value::Null).await;
    assert_eq!((again["cached"].as_bool(), &again["label"]), (Some(true), &label["label"]));
    let (_, topics) = h.get("/api/topics").await;
    assert_eq!(topics["topics"][0]["label"], label["label"]);
    let (_, topics2) = h.get("/api/topics").await;
    assert_eq!(topics, topics2);
    assert_eq!(h.stub.calls(), 1);

    let (s, body) = h.post("/api/topics/9/label", Value::Null).await;
    assert_eq!((s, body["error"]["code"].as_str()), (404, Some("unknown_topic")));
}

#[tokio::test]
async fn prelabel_labels_every_topic_once() {
    let h = start_with(StubBehavior::Scripted, true, Duration::from_secs(5)).await;
    assert_eq!(h.stub.calls(), 2);
    let (_, topics) = h.get("/api/topics").await;
    assert!(topics["topics"].as_array().unwrap().iter().all(|t| t["label"].is_string()));
    assert_eq!(h.stub.calls(), 2);
}

#[tokio::test]
async fn summarize_and_chat_flow() {
    let h = start().await;
    let (s, sum) = h.post("/api/summarize", serde_json::json!({"word": "upi", "time": 2})).await;
    assert_eq!(s, 200, "{sum}");
    assert_schema("summarize", &sum);
    let bullets = sum["bullets"].as_array().unwrap();
    assert!(!bullets.is_empty() && bullets.len() <= 7);

    let (s, created) = h.post("/api/sessions", serde_json::json!({"word": "rbi", "time": 0})).await;
    assert_eq!(s, 201, "{created}");
    assert_schema("session", &created);
    let id = created["session_id"].as_str().unwrap();

    let (s, reply) = h.post(&format!("/api/sessions/{id}/chat"), serde_json::json!({"message": "What did the RBI do with the repo rate?"})).await;
    assert_eq!(s, 200, "{reply}");
    assert_schema("chat", &reply);
    assert_eq!(reply["turn"], 0);
    assert!(reply["reply"].as_str().unwrap().starts_with("According to document"));

    let (_, reply) = h.post(&format!("/api/sessions/{id}/chat"), serde_json::json!({"message": "Who won the cricket final?"})).await;
    assert_eq!(reply["turn"], 1);
    assert_eq!(reply["reply"], topicscope_llm::REFUSAL_SENTINEL);

    let (s, body) = h.post("/api/sessions/nope/chat", serde_json::json!({"message": "hi"})).await;
    assert_eq!((s, body["error"]["code"].as_str()), (404, Some("unknown_session")));
    let (s, _) = h.post("/api/sessions", serde_json::json!({"doc_ids": ["missing"]})).await;
    assert_eq!(s, 400);
    let (s, _) = h.post("/api/summarize", serde_json::json!({"word": "rbi"})).await;
    assert_eq!(s, 400);
}

#[tokio::test]
async fn provider_timeout_is_a_bad_gateway() {
    let h = start_with(StubBehavior::Delay(Duration::from_secs(5)), false, Duration::from_millis(200)).await;
    let (_, created) = h.post("/api/sessions", serde_json::json!({"word": "rbi", "time": 0})).await;
    let id = created["session_id"].as_str().unwrap();
    let (s, body) = h.post(&format!("/api/sessions/{id}/chat"), serde_json::json!({"message": "rates?"})).await;
    assert_eq!(s, 502);
    assert_eq!(body["error"]["code"], "llm_timeout");
    assert_schema("error", &body);

    h.stub.set_behavior(StubBehavior::Status(500));
    let (s, body) = h.post("/api/topics/1/label", Value::Null).await;
    assert_eq!((s, body["error"]["code"].as_str()), (502, Some("llm_provider_error")));
}

#[tokio::test]
async fn startup_validation_names_missing_files() {
    let stub = StubServer::spawn(StubBehavior::Scripted).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    processed(dir.path());
    let model = tempfile::tempdir().unwrap();
    std::fs::copy(fixture().join("model/model_meta.json"), model.path().join("model_meta.json")).unwrap();
    let mut cfg = config(dir.path(), &stub, Duration::from_secs(1));
    cfg.model_dir = model.path().to_path_buf();
    let err = AppState::load(cfg.clone()).unwrap_err();
    assert!(matches!(err, StartupError::Model(_)));
    assert!(err.to_string().contains("beta.f32"), "{err}");

    cfg.model_dir = fixture().join("model");
    let first = AppState::load(cfg.clone()).unwrap();
    assert_eq!(first.index_status, CacheStatus::Built);
    let second = AppState::load(cfg).unwrap();
    assert_eq!(second.index_status, CacheStatus::Hit);
    assert_eq!(first.retriever.index, second.retriever.index);
}

#[test]
fn every_schema_parses() {
    for (name, text) in schema::ALL {
        let v: Value = serde_json::from_str(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        jsonschema::validator_for(&v).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
