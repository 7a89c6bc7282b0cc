use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use topicscope_core::corpus::{preprocess_corpus, read_docs_jsonl, read_stopwords, IngestConfig, ProcessedCorpus, VOCAB_FILE};
use topicscope_core::metrics::{ttq, DEFAULT_TOP_N};
use topicscope_core::retrieval::RetrieveParams;
use topicscope_core::saliency::{rank_salient, Membership, SaliencyConfig};
use topicscope_core::{Beta, DocRetriever};
use topicscope_llm::stub::StubState;
use topicscope_llm::{KeywordTrajectory, LlmClient, StubBehavior};
use topicscope_service::api::{Hit, Retrieved, Salient, SalientWord};
use topicscope_service::{AppState, BoundService, ServiceConfig};

use crate::args::*;
use crate::config::FileConfig;
use crate::error::CliError;

/// What a command reports: JSON for `--json`, text otherwise.
pub struct Report {
    pub json: Value,
    pub text: String,
}

impl Report {
    fn new(json: impl Serialize, text: impl Into<String>) -> Result<Self, CliError> {
        Ok(Self { json: serde_json::to_value(json)?, text: text.into() })
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::new("io_error", format!("{}: {e}", path.display())))
}

fn load_pair(corpus_dir: &Path, model_dir: &Path) -> Result<(ProcessedCorpus, Beta), CliError> {
    let corpus = ProcessedCorpus::load(corpus_dir)?;
    let beta = Beta::load_dir(model_dir, corpus_dir)?;
    if beta.vocab != corpus.vocab {
        return Err(CliError::new("vocab_mismatch", "VocabMismatch: model vocabulary differs from the corpus vocabulary"));
    }
    if beta.timestamps != corpus.timestamps {
        return Err(CliError::new("timestamp_mismatch", "TimestampMismatch: model timestamps differ from the corpus"));
    }
    Ok((corpus, beta))
}

fn runtime() -> Result<tokio::runtime::Runtime, CliError> {
    Ok(tokio::runtime::Builder::new_multi_thread().enable_all().build()?)
}

pub fn preprocess(a: &PreprocessArgs, cfg: &FileConfig) -> Result<Report, CliError> {
    let p = &cfg.preprocess;
    let defaults = IngestConfig::default();
    let mut ic = IngestConfig {
        min_count_bigram: a.min_count_bigram.or(p.min_count_bigram).unwrap_or(defaults.min_count_bigram),
        threshold_bigram: a.threshold_bigram.or(p.threshold_bigram).unwrap_or(defaults.threshold_bigram),
        remove_punctuation: !a.keep_punctuation,
        min_chars: a.min_chars.or(p.min_chars).unwrap_or(defaults.min_chars),
        min_words_docs: a.min_words_docs.or(p.min_words_docs).unwrap_or(defaults.min_words_docs),
        max_vocab: a.max_vocab.or(p.max_vocab),
        min_doc_freq: a.min_doc_freq.or(p.min_doc_freq),
        ..defaults
    };
    if let Some(path) = a.stopwords.as_ref().or(p.stopwords.as_ref()) {
        ic.stopwords = read_stopwords(path)?;
    }
    let docs = read_docs_jsonl(&a.input)?;
    let corpus = preprocess_corpus(&docs, &ic)?;
    corpus.write(&a.out)?;
    let s = &corpus.stats;
    let text = format!(
        "{} documents ({} dropped), {} terms, {} timestamps written to {}",
        s.num_docs,
        docs.len() - s.num_docs,
        s.vocab_size,
        s.num_timestamps,
        a.out.display()
    );
    Report::new(json!({"out": a.out, "input_docs": docs.len(), "stats": s}), text)
}

pub fn validate(a: &PairArgs) -> Result<Report, CliError> {
    let (corpus, beta) = load_pair(&a.corpus, &a.model)?;
    let summary = json!({
        "valid": true,
        "T": beta.num_times(),
        "K": beta.num_topics(),
        "V": beta.vocab_size(),
        "docs": corpus.num_docs(),
        "model_name": beta.model_name,
        "corpus_checksum": corpus.checksum(),
    });
    let text = format!(
        "ok: T={} K={} V={} docs={} model={}",
        beta.num_times(),
        beta.num_topics(),
        beta.vocab_size(),
        corpus.num_docs(),
        beta.model_name
    );
    Report::new(summary, text)
}

pub fn evaluate(a: &EvaluateArgs, cfg: &FileConfig) -> Result<Report, CliError> {
    let (corpus, beta) = load_pair(&a.pair.corpus, &a.pair.model)?;
    let n = a.topn.or(cfg.metrics.top_n).unwrap_or(DEFAULT_TOP_N);
    let q = ttq(&beta, &corpus, n)?;
    if let Some(out) = &a.out {
        write_json(out, &q)?;
    }
    let mut text = format!("{:>6} {:>9} {:>9} {:>9}\n", "topic", "TTC", "TTS", "TTQ");
    for t in &q.per_topic {
        text.push_str(&format!("{:>6} {:>9.4} {:>9.4} {:>9.4}\n", t.topic, t.ttc, t.tts, t.ttq));
    }
    text.push_str(&format!("{:>6} {:>9.4} {:>9.4} {:>9.4}", "mean", q.ttc, q.tts, q.ttq));
    Report::new(&q, text)
}

pub fn salient(a: &SalientArgs, cfg: &FileConfig) -> Result<Report, CliError> {
    let labels = a.corpus.clone().unwrap_or_else(|| a.model.clone());
    if !labels.join(VOCAB_FILE).exists() {
        return Err(CliError::new(
            "missing_file",
            format!("MissingFile: {} (pass --corpus)", labels.join(VOCAB_FILE).display()),
        ));
    }
    let beta = Beta::load_dir(&a.model, &labels)?;
    let defaults = SaliencyConfig::<f64>::default();
    let sc = SaliencyConfig {
        pool_size: a.pool.or(cfg.saliency.pool).unwrap_or(defaults.pool_size),
        top_n_membership: a.topn.or(cfg.saliency.top_n).unwrap_or(defaults.top_n_membership),
        epsilon: cfg.saliency.epsilon.unwrap_or(defaults.epsilon),
        membership: match a.membership {
            Some(MembershipArg::Averaged) => Membership::TimeAveraged,
            _ => Membership::AnyTimestamp,
        },
    };
    if sc.pool_size == 0 {
        return Err(CliError::new("invalid_parameter", "--pool must be >= 1"));
    }
    let ranked = rank_salient(&beta, a.topic, &sc, a.limit)?;
    let words: Vec<SalientWord> = ranked
        .into_iter()
        .map(|r| SalientWord {
            id: r.word,
            word: beta.vocab[r.word].clone(),
            s_burst: r.s_burst,
            s_spec: r.s_spec,
            s_uniq: r.s_uniq,
            s_final: r.s_final,
        })
        .collect();
    let mut text = format!("{:<24} {:>10} {:>10} {:>8} {:>10}\n", "word", "burst", "spec", "uniq", "final");
    for w in &words {
        text.push_str(&format!(
            "{:<24} {:>10.4} {:>10.4} {:>8.4} {:>10.4}\n",
            w.word, w.s_burst, w.s_spec, w.s_uniq, w.s_final
        ));
    }
    let out = Salient { topic: a.topic, pool: sc.pool_size, words };
    if let Some(path) = &a.out {
        write_json(path, &out)?;
    }
    Report::new(&out, text.trim_end().to_string())
}

pub fn label(a: &LabelArgs, cfg: &FileConfig) -> Result<Report, CliError> {
    let (_, beta) = load_pair(&a.pair.corpus, &a.pair.model)?;
    let n = a.topn.or(cfg.metrics.top_n).unwrap_or(DEFAULT_TOP_N);
    let cache_root = a.cache_dir.clone().unwrap_or_else(|| a.pair.corpus.join("cache"));
    let client = LlmClient::open(cfg.llm_settings(), &cache_root)?;
    let topics: Vec<usize> = match a.topic {
        Some(k) => {
            beta.check_topic(k)?;
            vec![k]
        }
        None => (0..beta.num_topics()).collect(),
    };
    let rt = runtime()?;
    let mut labels = Vec::new();
    for k in topics {
        let traj = KeywordTrajectory::from_beta(&beta, k, n)?;
        let label = rt.block_on(client.label_topic(&traj))?;
        labels.push(json!({"id": k, "label": label}));
    }
    let text = labels
        .iter()
        .map(|l| format!("{}\t{}", l["id"], l["label"].as_str().unwrap_or_default()))
        .collect::<Vec<_>>()
        .join("\n");
    Report::new(json!({"topics": labels}), text)
}

fn resolve_time(corpus: &ProcessedCorpus, time: &str) -> Result<usize, CliError> {
    if let Some(i) = corpus.timestamps.iter().position(|t| t == time) {
        return Ok(i);
    }
    match time.parse::<usize>() {
        Ok(i) if i < corpus.num_times() => Ok(i),
        _ => Err(CliError::new(
            "unknown_time",
            format!("unknown timestamp `{time}`; known: {}", corpus.timestamps.join(", ")),
        )),
    }
}

pub fn retrieve(a: &RetrieveArgs, cfg: &FileConfig) -> Result<Report, CliError> {
    let corpus = ProcessedCorpus::load(&a.corpus)?;
    let t = resolve_time(&corpus, &a.time)?;
    let (retriever, _) = DocRetriever::build_cached(corpus, &a.corpus)?;
    let d = RetrieveParams::<f64>::default();
    let params = RetrieveParams {
        limit: a.limit.or(cfg.retrieve.limit).unwrap_or(d.limit),
        lambda: a.lambda.or(cfg.retrieve.lambda).unwrap_or(d.lambda),
        candidates: a.candidates.or(cfg.retrieve.candidates).unwrap_or(d.candidates),
        query: d.query,
    };
    let word = a.word.trim().to_lowercase();
    let results: Vec<Hit> = retriever
        .retrieve(&word, t, &params)?
        .into_iter()
        .map(|r| Hit {
            text: retriever.doc_text(&r.doc_id).unwrap_or_default().to_string(),
            doc_id: r.doc_id,
            relevance: r.relevance,
            highlights: r.highlights.into_iter().map(|(s, e)| [s, e]).collect(),
        })
        .collect();
    let text = if results.is_empty() {
        format!("no documents contain `{word}` at {}", retriever.corpus.timestamps[t])
    } else {
        results
            .iter()
            .map(|h| format!("{}\t{:.4}\t{}", h.doc_id, h.relevance, h.text))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let out = Retrieved { word, time: t, timestamp: retriever.corpus.timestamps[t].clone(), results };
    Report::new(&out, text)
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

pub fn serve_config(a: &ServeArgs, cfg: &FileConfig) -> Result<ServiceConfig, CliError> {
    let s = &cfg.serve;
    let host = a.host.clone().or(s.host.clone()).unwrap_or_else(|| "127.0.0.1".into());
    let port = a.port.or(s.port).unwrap_or(8080);
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| CliError::new("invalid_parameter", format!("listen address {host}:{port}: {e}")))?;
    let mut sc = ServiceConfig::new(&a.pair.corpus, &a.pair.model);
    sc.addr = addr;
    sc.cache_dir = a.cache_dir.clone().or(s.cache_dir.clone());
    sc.llm = cfg.llm_settings();
    sc.prelabel = a.prelabel || s.prelabel.unwrap_or(false);
    sc.static_dir = a.static_dir.clone().or(s.static_dir.clone());
    sc.cors_origins = if a.cors.is_empty() { s.cors_origins.clone().unwrap_or_default() } else { a.cors.clone() };
    sc.top_n = cfg.metrics.top_n.unwrap_or(DEFAULT_TOP_N);
    let d = sc.retrieve;
    sc.retrieve = RetrieveParams {
        lambda: cfg.retrieve.lambda.unwrap_or(d.lambda),
        limit: cfg.retrieve.limit.unwrap_or(d.limit),
        candidates: cfg.retrieve.candidates.unwrap_or(d.candidates),
        query: d.query,
    };
    if let Some(pool) = cfg.saliency.pool {
        sc.saliency.pool_size = pool;
    }
    Ok(sc)
}

pub fn serve(a: &ServeArgs, cfg: &FileConfig, quiet: bool) -> Result<Report, CliError> {
    let sc = serve_config(a, cfg)?;
    let rt = runtime()?;
    rt.block_on(async move {
        let state = AppState::load(sc)?;
        let bound = BoundService::bind(state).await?;
        let addr = bound.local_addr()?;
        if !quiet {
            eprintln!("listening on http://{addr}");
        }
        bound.run(shutdown_signal()).await?;
        Report::new(json!({"stopped": true, "addr": addr.to_string()}), "stopped")
    })
}

pub fn stub_llm(a: &StubArgs, quiet: bool) -> Result<Report, CliError> {
    let behavior = match &a.fixed {
        Some(text) => StubBehavior::Fixed(text.clone()),
        None => StubBehavior::Scripted,
    };
    let rt = runtime()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(("127.0.0.1", a.port)).await?;
        let addr = listener.local_addr()?;
        // the base URL goes to stdout so scripts can capture it
        println!("http://{addr}/v1");
        if !quiet {
            eprintln!("stub provider ready; export LLM_API_BASE=http://{addr}/v1");
        }
        let state: Arc<StubState> = StubState::new(behavior);
        topicscope_llm::stub::serve_until(listener, state.clone(), shutdown_signal()).await?;
        Report::new(json!({"calls": state.calls()}), format!("served {} calls", state.calls()))
    })
}
