use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/e2e")
}

fn topicscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topicscope")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn preprocess(out: &Path) {
    let f = fixture();
    let o = topicscope(&[
        "preprocess",
        "--input",
        s(&f.join("docs.jsonl")),
        "--out",
        s(out),
        "--stopwords",
        s(&f.join("stopwords.txt")),
        "--min-count-bigram",
        "3",
        "--threshold-bigram",
        "1",
        "--min-doc-freq",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(topicscope(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(topicscope(&["validate"]).status.code(), Some(2));
    assert_eq!(topicscope(&["--help"]).status.code(), Some(0));
    assert_eq!(topicscope_cli::run(["topicscope", "salient", "--topic", "x"]), topicscope_cli::EXIT_USAGE);
}

#[test]
fn evaluate_writes_quality_report() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("processed");
    preprocess(&corpus);
    for f in ["tokens.jsonl", "vocab.txt", "timestamps.txt", "stats.json"] {
        assert!(corpus.join(f).exists(), "{f}");
    }
    let out = dir.path().join("quality.json");
    let o = topicscope(&["--json", "evaluate", "--corpus", s(&corpus), "--model", s(&fixture().join("model")), "--topn", "5", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let q: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let per = q["per_topic"].as_array().unwrap();
    assert_eq!(per.len(), 2);
    for p in per {
        assert_eq!(p["ttq"].as_f64().unwrap(), p["ttc"].as_f64().unwrap() * p["tts"].as_f64().unwrap());
    }
    let stdout: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(stdout.is_object());
}

#[test]
fn corrupt_tensor_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("processed");
    preprocess(&corpus);
    let model = dir.path().join("model");
    std::fs::create_dir(&model).unwrap();
    std::fs::copy(fixture().join("model/model_meta.json"), model.join("model_meta.json")).unwrap();
    let mut beta: Value = serde_json::from_slice(&std::fs::read(fixture().join("model/beta.json")).unwrap()).unwrap();
    beta[1][0][0] = Value::from(0.9);
    std::fs::write(model.join("beta.json"), beta.to_string()).unwrap();

    let o = topicscope(&["validate", "--corpus", s(&corpus), "--model", s(&model)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("NotADistribution"), "{err}");

    let o = topicscope(&["--json", "validate", "--corpus", s(&corpus), "--model", s(&model)]);
    let body: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(body["error"]["code"], "not_a_distribution");

    let o = topicscope(&["validate", "--corpus", s(&corpus), "--model", s(&dir.path().join("absent"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn salient_and_retrieve_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("processed");
    preprocess(&corpus);
    let model = fixture().join("model");
    let o = topicscope(&["--json", "salient", "--model", s(&model), "--corpus", s(&corpus), "--topic", "0", "--limit", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let body: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(body["words"].as_array().map(Vec::len), Some(3), "{body}");

    let o = topicscope(&["--json", "retrieve", "--corpus", s(&corpus), "--word", "rbi", "--time", "2015"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let body: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(body["results"].as_array().map(Vec::len), Some(2), "{body}");

    let o = topicscope(&["retrieve", "--corpus", s(&corpus), "--word", "rbi", "--time", "1999"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("topicscope.toml");
    std::fs::write(&cfg, "[retrieve]\nlamda = 0.5\n").unwrap();
    let o = topicscope(&["--config", s(&cfg), "validate", "--corpus", "x", "--model", "y"]);
    assert_eq!(o.status.code(), Some(1));
}
