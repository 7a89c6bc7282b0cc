use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use topicscope_llm::prompts::{chat_system_prompt, label_prompt, render_context, summary_prompt};
use topicscope_llm::{
    cache_key, CacheEntry, DiskCache, GroundedSession, KeywordTrajectory, LlmClient, LlmError, LlmSettings,
    OpenAiCompatible, ProviderSettings, StubBehavior, StubServer, REFUSAL_SENTINEL,
};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn check_golden(name: &str, rendered: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDENS").is_some() {
        std::fs::write(&path, rendered).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(rendered, want, "{name} drifted from its golden file");
}

fn trajectory() -> KeywordTrajectory {
    let row = |t: &str, ws: &str| (t.to_string(), ws.split(", ").map(String::from).collect());
    KeywordTrajectory {
        topic: 0,
        rows: vec![
            row("2019", "outbreak, pneumonia, china, wuhan, virus"),
            row("2020", "lockdown, pandemic, covid, quarantine, mask"),
            row("2021", "vaccine, immunity, doses, pfizer, rollout"),
        ],
    }
}

fn docs() -> Vec<String> {
    vec![
        "The RBI raised the repo rate to curb inflation.".into(),
        "Credit card fraud cases rose sharply in the second quarter.".into(),
        "NPCI reported record UPI volumes during the festive season.".into(),
    ]
}

fn client(stub: &StubServer, cache_dir: &std::path::Path) -> LlmClient {
    let settings = LlmSettings {
        provider: ProviderSettings {
            base_url: stub.base_url(),
            api_key: None,
            model: "stub-model".into(),
            timeout: Duration::from_secs(5),
        },
        ..LlmSettings::default()
    };
    LlmClient::open(settings, cache_dir).unwrap()
}

#[test]
fn prompt_goldens() {
    let label = label_prompt(&trajectory()).unwrap();
    assert!(label.contains("2019: outbreak, pneumonia, china, wuhan, virus\n2020: "));
    check_golden("label.txt", &label);

    let ctx = render_context(&docs(), Default::default()).unwrap();
    let summary = summary_prompt(&ctx, &["rbi".into(), "credit_card".into()], "2016");
    check_golden("summary.txt", &summary);

    let chat = chat_system_prompt(&ctx, "What did the RBI do?");
    assert!(chat.contains(REFUSAL_SENTINEL));
    check_golden("chat.txt", &chat);

    assert_eq!(label, label_prompt(&trajectory()).unwrap());
    let single = KeywordTrajectory { topic: 0, rows: trajectory().rows[..1].to_vec() };
    let one = label_prompt(&single).unwrap();
    assert!(one.contains("Top words over time: 2019: outbreak, pneumonia, china, wuhan, virus\n\nReturn ONLY"));
}

#[tokio::test]
async fn label_round_trip_and_cache_contract() {
    let stub = StubServer::spawn(StubBehavior::Fixed("COVID-19 Pandemic Response\n".into())).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let c = client(&stub, dir.path());
    let traj = trajectory();

    assert_eq!(c.label_topic(&traj).await.unwrap(), "COVID-19 Pandemic Response");
    let key = cache_key(&c.label_request(&traj).unwrap());
    let stored = c.cache().get(&key).unwrap().unwrap();
    assert_eq!(stored.value.trim(), "COVID-19 Pandemic Response");
    assert_eq!(stored.model, "stub-model");
    assert_eq!(stub.calls(), 1);
    assert_eq!(stub.state().bodies()[0]["temperature"], 0.0);

    // pre-seeded entries answer with zero calls
    let other = KeywordTrajectory { topic: 1, rows: vec![("2020".into(), vec!["upi".into()])] };
    let other_key = cache_key(&c.label_request(&other).unwrap());
    c.cache().put(&CacheEntry::new(other_key, "stub-model", "Digital Payments")).unwrap();
    assert_eq!(c.label_topic(&other).await.unwrap(), "Digital Payments");
    assert_eq!(c.cached_label(&other).unwrap().as_deref(), Some("Digital Payments"));
    assert_eq!(stub.calls(), 1);
}

#[tokio::test]
async fn provider_failure_leaves_cache_untouched() {
    let stub = StubServer::spawn(StubBehavior::Status(500)).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let c = client(&stub, dir.path());
    match c.label_topic(&trajectory()).await {
        Err(LlmError::Provider { status: 500, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(c.cache().len().unwrap(), 0);

    stub.set_behavior(StubBehavior::Empty);
    assert!(matches!(c.label_topic(&trajectory()).await, Err(LlmError::EmptyResponse)));
    assert_eq!(c.cache().len().unwrap(), 0);
}

#[tokio::test]
async fn timeout_maps_to_its_own_code() {
    let stub = StubServer::spawn(StubBehavior::Delay(Duration::from_secs(3))).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut settings = LlmSettings::default();
    settings.provider = ProviderSettings { base_url: stub.base_url(), timeout: Duration::from_millis(200), ..settings.provider };
    let c = LlmClient::open(settings, dir.path()).unwrap();
    let err = c.summarize(&docs(), &["rbi".into()], "2016").await.unwrap_err();
    assert_eq!(err.code(), "llm_timeout");
}

#[tokio::test]
async fn summarize_round_trip() {
    let stub = StubServer::spawn(StubBehavior::Scripted).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let c = client(&stub, dir.path());
    let words = vec!["rbi".to_string()];
    let s = c.summarize(&docs(), &words, "2016").await.unwrap();
    assert_eq!(s.lines().count(), 3);
    assert!(s.lines().all(|l| l.starts_with("- Theme ") && l.contains(" of 3: ")));
    assert_eq!(c.summarize(&docs(), &words, "2016").await.unwrap(), s);
    assert_eq!(stub.calls(), 1);
    assert!(matches!(c.summarize(&[], &words, "2016").await, Err(LlmError::NoContext)));
}

#[tokio::test]
async fn chat_is_grounded_and_append_only() {
    let stub = StubServer::spawn(StubBehavior::Scripted).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let c = client(&stub, dir.path());
    let mut session = GroundedSession::new("s1", docs());

    let a = c.chat_reply(&mut session, "What happened to the repo rate?").await.unwrap();
    assert_eq!(a, "According to document 1: The RBI raised the repo rate to curb inflation.");
    let b = c.chat_reply(&mut session, "Who won the football league?").await.unwrap();
    assert_eq!(b, REFUSAL_SENTINEL);
    assert_eq!(session.history.len(), 4);

    // the second call replays the first exchange after the grounded system text
    let body = &stub.state().bodies()[1];
    let msgs = body["messages"].as_array().unwrap();
    assert_eq!(msgs.len(), 4);
    assert!(msgs[0]["content"].as_str().unwrap().contains("Document 1:\nThe RBI raised"));
    assert_eq!(msgs[2]["content"], a.as_str());
    assert_eq!(msgs[3]["content"], "Who won the football league?");
}

#[tokio::test]
async fn refusal_sentinel_passes_through_verbatim() {
    let stub = StubServer::spawn(StubBehavior::Fixed(REFUSAL_SENTINEL.into())).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let c = client(&stub, dir.path());
    let mut session = GroundedSession::new("s", docs());
    assert_eq!(c.chat_reply(&mut session, "anything").await.unwrap(), REFUSAL_SENTINEL);
}

#[tokio::test]
async fn calls_equal_distinct_keys_and_survive_restart() {
    let stub = StubServer::spawn(StubBehavior::Scripted).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let users = ["a", "b", "a", "c", "d", "b", "a", "d", "c", "c"];
    let run = |c: LlmClient| async move {
        let mut keys = std::collections::BTreeSet::new();
        for u in users {
            let req = topicscope_llm::LlmRequest {
                provider: c.settings().provider.base_url.clone(),
                model: "stub-model".into(),
                system: None,
                history: vec![],
                user: u.into(),
                max_tokens: 8,
            };
            let done = c.complete(&req).await.unwrap();
            assert_eq!(done.key.len(), 64);
            keys.insert(done.key);
        }
        keys.len()
    };
    assert_eq!(run(client(&stub, dir.path())).await, 4);
    assert_eq!(stub.calls(), 4);
    assert_eq!(run(client(&stub, dir.path())).await, 4);
    assert_eq!(stub.calls(), 4);
}

#[tokio::test]
async fn concurrent_identical_requests_share_one_call() {
    let stub = StubServer::spawn(StubBehavior::Delay(Duration::from_millis(100))).await.unwrap();
    let dir = tempfile::tempdir().unwrap();
    let c = client(&stub, dir.path());
    let traj = trajectory();
    let jobs: Vec<_> = (0..6)
        .map(|_| {
            let (c, traj) = (c.clone(), traj.clone());
            tokio::spawn(async move { c.label_topic(&traj).await.unwrap() })
        })
        .collect();
    for j in jobs {
        assert_eq!(j.await.unwrap(), "Outbreak Pneumonia China");
    }
    assert_eq!(stub.calls(), 1);
}

#[test]
fn direct_cache_use_without_provider() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Arc::new(DiskCache::open(dir.path().join("llm")).unwrap());
    assert!(cache.is_empty().unwrap());
    let _ = OpenAiCompatible::new(&ProviderSettings::default()).unwrap();
}
