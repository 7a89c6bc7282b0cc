//! Corpus ingestion: tokenization, bigram phrase detection, vocabulary
//! pruning and timestamp binning, plus the on-disk processed-corpus layout.
//!
//! Layout of a processed directory:
//!
//! - `tokens.jsonl`: one `{"id", "tokens", "time_index"}` object per line
//! - `vocab.txt`: one term per line, line number is the term id
//! - `timestamps.txt`: one label per line, line number is the time index
//! - `stats.json`: per-bin document counts and length statistics
//! - `texts.jsonl`: `{"id", "text"}` with the original text of every kept document

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const TOKENS_FILE: &str = "tokens.jsonl";
pub const VOCAB_FILE: &str = "vocab.txt";
pub const TIMESTAMPS_FILE: &str = "timestamps.txt";
pub const STATS_FILE: &str = "stats.json";
pub const TEXTS_FILE: &str = "texts.jsonl";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("every document was filtered out; nothing left to process")]
    EmptyCorpus,
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("invalid ingest configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}:{line}: {source}")]
    BadRecord {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error("corrupt processed corpus: {0}")]
    Corrupt(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One input record of `docs.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    pub stopwords: HashSet<String>,
    pub min_count_bigram: usize,
    pub threshold_bigram: f64,
    pub remove_punctuation: bool,
    pub min_chars: usize,
    pub min_words_docs: usize,
    pub max_vocab: Option<usize>,
    pub min_doc_freq: Option<usize>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            stopwords: HashSet::new(),
            min_count_bigram: 5,
            threshold_bigram: 20.0,
            remove_punctuation: true,
            min_chars: 3,
            min_words_docs: 3,
            max_vocab: None,
            min_doc_freq: None,
        }
    }
}

impl IngestConfig {
    pub fn with_stopwords<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stopwords = words
            .into_iter()
            .map(|w| w.as_ref().to_lowercase())
            .collect();
        self
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.min_count_bigram < 1 {
            return Err(IngestError::InvalidConfig("min_count_bigram must be >= 1".into()));
        }
        if self.threshold_bigram.is_nan() || self.threshold_bigram <= 0.0 {
            return Err(IngestError::InvalidConfig("threshold_bigram must be > 0".into()));
        }
        if self.min_chars < 1 {
            return Err(IngestError::InvalidConfig("min_chars must be >= 1".into()));
        }
        if self.min_words_docs < 1 {
            return Err(IngestError::InvalidConfig("min_words_docs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Reads a stopword file: one word per line, `#` starts a comment.
pub fn read_stopwords(path: &Path) -> Result<HashSet<String>, IngestError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase())
        .filter(|l| !l.is_empty())
        .collect())
}

pub(crate) fn is_glue_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Byte range of the token core once leading and trailing punctuation is removed.
pub(crate) fn punct_trimmed(token: &str) -> (usize, usize) {
    let start = token
        .char_indices()
        .find(|&(_, c)| is_glue_char(c))
        .map(|(i, _)| i);
    match start {
        None => (0, 0),
        Some(s) => {
            let end = token
                .char_indices()
                .rev()
                .find(|&(_, c)| is_glue_char(c))
                .map(|(i, c)| i + c.len_utf8())
                .unwrap_or(s);
            (s, end)
        }
    }
}

/// Whitespace split, lowercase, punctuation trim, length floor, stopword removal.
pub fn tokenize_doc(text: &str, cfg: &IngestConfig) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let word = if cfg.remove_punctuation {
                let (s, e) = punct_trimmed(raw);
                &raw[s..e]
            } else {
                raw
            };
            let word = word.to_lowercase();
            if word.is_empty() || word.chars().count() < cfg.min_chars {
                return None;
            }
            if cfg.stopwords.contains(&word) {
                return None;
            }
            Some(word)
        })
        .collect()
}

/// Counts behind one candidate bigram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BigramCounts {
    pub joint: usize,
    pub left: usize,
    pub right: usize,
    /// Number of distinct terms in the streams.
    pub distinct: usize,
}

impl BigramCounts {
    /// `(joint - min_count) * distinct / (left * right)`, clamped at zero below `min_count`.
    pub fn score(&self, min_count: usize) -> f64 {
        if self.joint < min_count || self.left == 0 || self.right == 0 {
            return 0.0;
        }
        (self.joint - min_count) as f64 * self.distinct as f64
            / (self.left as f64 * self.right as f64)
    }

    pub fn qualifies(&self, min_count: usize, threshold: f64) -> bool {
        self.joint >= min_count && self.score(min_count) >= threshold
    }
}

/// Bigrams accepted by [`detect_bigrams`] together with their scores.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhraseTable {
    pub phrases: BTreeMap<(String, String), f64>,
}

impl PhraseTable {
    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn contains(&self, a: &str, b: &str) -> bool {
        self.phrases.contains_key(&(a.to_string(), b.to_string()))
    }

    /// Single greedy left-to-right merge pass.
    pub fn apply(&self, stream: &[String]) -> Vec<String> {
        let mut out = Vec::with_capacity(stream.len());
        let mut i = 0;
        while i < stream.len() {
            if i + 1 < stream.len() && self.contains(&stream[i], &stream[i + 1]) {
                out.push(format!("{}_{}", stream[i], stream[i + 1]));
                i += 2;
            } else {
                out.push(stream[i].clone());
                i += 1;
            }
        }
        out
    }
}

/// Detects collocations over adjacent token pairs and rewrites the streams.
///
/// Tokens that already contain `_` never form a pair, so a second pass over
/// merged output cannot build trigrams.
pub fn detect_bigrams(streams: &[Vec<String>], cfg: &IngestConfig) -> (PhraseTable, Vec<Vec<String>>) {
    let mut unigram: HashMap<&str, usize> = HashMap::new();
    let mut pairs: HashMap<(&str, &str), usize> = HashMap::new();
    for stream in streams {
        for tok in stream {
            *unigram.entry(tok.as_str()).or_default() += 1;
        }
        for w in stream.windows(2) {
            if w[0].contains('_') || w[1].contains('_') {
                continue;
            }
            *pairs.entry((w[0].as_str(), w[1].as_str())).or_default() += 1;
        }
    }
    let distinct = unigram.len();
    let mut table = PhraseTable::default();
    for (&(a, b), &joint) in &pairs {
        let counts = BigramCounts {
            joint,
            left: unigram[a],
            right: unigram[b],
            distinct,
        };
        if counts.qualifies(cfg.min_count_bigram, cfg.threshold_bigram) {
            table
                .phrases
                .insert((a.to_string(), b.to_string()), counts.score(cfg.min_count_bigram));
        }
    }
    let rewritten = streams.iter().map(|s| table.apply(s)).collect();
    (table, rewritten)
}

/// Ordered timestamp labels and the label to index map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeBins {
    pub labels: Vec<String>,
    pub index: HashMap<String, usize>,
}

impl TimeBins {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Distinct labels sorted numerically when every label is an integer, else lexicographically.
pub fn bin_timestamps<S: AsRef<str>>(raw_labels: &[S]) -> TimeBins {
    let mut labels: Vec<String> = raw_labels
        .iter()
        .map(|s| s.as_ref().to_string())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    let numeric: Option<Vec<i128>> = labels.iter().map(|l| l.trim().parse::<i128>().ok()).collect();
    if numeric.is_some() {
        labels.sort_by(|a, b| {
            let x: i128 = a.trim().parse().unwrap();
            let y: i128 = b.trim().parse().unwrap();
            x.cmp(&y).then_with(|| a.cmp(b))
        });
    } else {
        labels.sort();
    }
    let index = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    TimeBins { labels, index }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessedDocument {
    pub id: String,
    pub tokens: Vec<String>,
    pub time_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinCount {
    pub timestamp: String,
    pub docs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub num_docs: usize,
    pub avg_len: f64,
    pub std_len: f64,
    pub num_timestamps: usize,
    pub vocab_size: usize,
    pub docs_per_bin: Vec<BinCount>,
}

impl CorpusStats {
    fn compute(documents: &[ProcessedDocument], timestamps: &[String], vocab_size: usize) -> Self {
        let n = documents.len();
        let mut per_bin = vec![0usize; timestamps.len()];
        for d in documents {
            per_bin[d.time_index] += 1;
        }
        let (avg_len, std_len) = if n == 0 {
            (0.0, 0.0)
        } else {
            let mean = documents.iter().map(|d| d.tokens.len() as f64).sum::<f64>() / n as f64;
            let var = documents
                .iter()
                .map(|d| (d.tokens.len() as f64 - mean).powi(2))
                .sum::<f64>()
                / n as f64;
            (mean, var.sqrt())
        };
        CorpusStats {
            num_docs: n,
            avg_len,
            std_len,
            num_timestamps: timestamps.len(),
            vocab_size,
            docs_per_bin: timestamps
                .iter()
                .zip(per_bin)
                .map(|(t, docs)| BinCount {
                    timestamp: t.clone(),
                    docs,
                })
                .collect(),
        }
    }
}

/// Tokenized, binned corpus. `texts[i]` is the original text of `documents[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedCorpus {
    pub documents: Vec<ProcessedDocument>,
    pub vocab: Vec<String>,
    pub timestamps: Vec<String>,
    pub stats: CorpusStats,
    pub texts: Vec<String>,
    term_ids: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct TextRecord {
    id: String,
    text: String,
}

impl ProcessedCorpus {
    /// Assembles a corpus from already tokenized documents, checking every invariant.
    pub fn from_parts(
        documents: Vec<ProcessedDocument>,
        vocab: Vec<String>,
        timestamps: Vec<String>,
        texts: Option<Vec<String>>,
    ) -> Result<Self, IngestError> {
        let term_ids: HashMap<String, usize> = vocab
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        if term_ids.len() != vocab.len() {
            return Err(IngestError::Corrupt("vocabulary contains duplicate terms".into()));
        }
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(IngestError::DuplicateId(d.id.clone()));
            }
            if d.time_index >= timestamps.len() {
                return Err(IngestError::Corrupt(format!(
                    "document `{}` has time_index {} but only {} timestamps",
                    d.id,
                    d.time_index,
                    timestamps.len()
                )));
            }
            if let Some(t) = d.tokens.iter().find(|t| !term_ids.contains_key(*t)) {
                return Err(IngestError::Corrupt(format!(
                    "document `{}` uses term `{t}` missing from the vocabulary",
                    d.id
                )));
            }
        }
        let texts = match texts {
            Some(t) if t.len() == documents.len() => t,
            Some(_) => return Err(IngestError::Corrupt("texts do not line up with documents".into())),
            None => documents.iter().map(|d| d.tokens.join(" ")).collect(),
        };
        let stats = CorpusStats::compute(&documents, &timestamps, vocab.len());
        Ok(Self {
            documents,
            vocab,
            timestamps,
            stats,
            texts,
            term_ids,
        })
    }

    pub fn num_docs(&self) -> usize {
        self.documents.len()
    }

    pub fn num_times(&self) -> usize {
        self.timestamps.len()
    }

    pub fn term_id(&self, term: &str) -> Option<usize> {
        self.term_ids.get(term).copied()
    }

    fn tokens_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for d in &self.documents {
            serde_json::to_writer(&mut out, d).expect("serializing a document cannot fail");
            out.push(b'\n');
        }
        out
    }

    fn lines_bytes(lines: &[String]) -> Vec<u8> {
        let mut out = Vec::new();
        for l in lines {
            out.extend_from_slice(l.as_bytes());
            out.push(b'\n');
        }
        out
    }

    fn texts_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for (d, text) in self.documents.iter().zip(&self.texts) {
            let rec = TextRecord {
                id: d.id.clone(),
                text: text.clone(),
            };
            serde_json::to_writer(&mut out, &rec).expect("serializing a text record cannot fail");
            out.push(b'\n');
        }
        out
    }

    /// SHA-256 over the serialized tokens, vocabulary and timestamps.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        for part in [
            self.tokens_bytes(),
            Self::lines_bytes(&self.vocab),
            Self::lines_bytes(&self.timestamps),
        ] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(&part);
        }
        hex::encode(h.finalize())
    }

    pub fn write(&self, dir: &Path) -> Result<(), IngestError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut stats = serde_json::to_vec_pretty(&self.stats).expect("stats serialize");
        stats.push(b'\n');
        let files: [(&str, Vec<u8>); 5] = [
            (TOKENS_FILE, self.tokens_bytes()),
            (VOCAB_FILE, Self::lines_bytes(&self.vocab)),
            (TIMESTAMPS_FILE, Self::lines_bytes(&self.timestamps)),
            (STATS_FILE, stats),
            (TEXTS_FILE, self.texts_bytes()),
        ];
        for (name, bytes) in files {
            let path = dir.join(name);
            let mut f = fs::File::create(&path).map_err(io_err(&path))?;
            f.write_all(&bytes).map_err(io_err(&path))?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, IngestError> {
        let tokens_path = dir.join(TOKENS_FILE);
        let documents: Vec<ProcessedDocument> = read_jsonl(&tokens_path)?;
        let vocab = read_lines(&dir.join(VOCAB_FILE))?;
        let timestamps = read_lines(&dir.join(TIMESTAMPS_FILE))?;
        let texts_path = dir.join(TEXTS_FILE);
        let texts = if texts_path.exists() {
            let records: Vec<TextRecord> = read_jsonl(&texts_path)?;
            let by_id: HashMap<String, String> =
                records.into_iter().map(|r| (r.id, r.text)).collect();
            let texts: Option<Vec<String>> = documents.iter().map(|d| by_id.get(&d.id).cloned()).collect();
            Some(texts.ok_or_else(|| {
                IngestError::Corrupt(format!("{} is missing documents", texts_path.display()))
            })?)
        } else {
            None
        };
        Self::from_parts(documents, vocab, timestamps, texts)
    }
}

pub fn read_lines(path: &Path) -> Result<Vec<String>, IngestError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, IngestError> {
    let f = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| IngestError::BadRecord {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?);
    }
    Ok(out)
}

/// Reads `docs.jsonl`.
pub fn read_docs_jsonl(path: &Path) -> Result<Vec<RawDocument>, IngestError> {
    read_jsonl(path)
}

fn prune_vocabulary(streams: &[Vec<String>], cfg: &IngestConfig) -> Option<HashSet<String>> {
    if cfg.min_doc_freq.is_none() && cfg.max_vocab.is_none() {
        return None;
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for s in streams {
        let uniq: HashSet<&str> = s.iter().map(String::as_str).collect();
        for t in uniq {
            *df.entry(t).or_default() += 1;
        }
    }
    let floor = cfg.min_doc_freq.unwrap_or(0);
    let mut kept: Vec<(&str, usize)> = df.into_iter().filter(|&(_, n)| n >= floor).collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    if let Some(max) = cfg.max_vocab {
        kept.truncate(max);
    }
    Some(kept.into_iter().map(|(t, _)| t.to_string()).collect())
}

/// Full ingestion pipeline: tokenize, merge bigrams, prune, drop short
/// documents, bin timestamps and build the frequency-ordered vocabulary.
pub fn preprocess_corpus(docs: &[RawDocument], cfg: &IngestConfig) -> Result<ProcessedCorpus, IngestError> {
    cfg.validate()?;
    let mut ids = HashSet::with_capacity(docs.len());
    for d in docs {
        if !ids.insert(d.id.as_str()) {
            return Err(IngestError::DuplicateId(d.id.clone()));
        }
    }

    let streams: Vec<Vec<String>> = docs.par_iter().map(|d| tokenize_doc(&d.text, cfg)).collect();
    let (_, mut streams) = detect_bigrams(&streams, cfg);
    if let Some(keep) = prune_vocabulary(&streams, cfg) {
        for s in &mut streams {
            s.retain(|t| keep.contains(t));
        }
    }

    let kept: Vec<(usize, Vec<String>)> = streams
        .into_iter()
        .enumerate()
        .filter(|(_, s)| s.len() >= cfg.min_words_docs)
        .collect();
    if kept.is_empty() {
        return Err(IngestError::EmptyCorpus);
    }

    let labels: Vec<&str> = kept.iter().map(|(i, _)| docs[*i].timestamp.as_str()).collect();
    let bins = bin_timestamps(&labels);

    let mut freq: HashMap<&str, usize> = HashMap::new();
    for (_, s) in &kept {
        for t in s {
            *freq.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut vocab: Vec<(&str, usize)> = freq.into_iter().collect();
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let vocab: Vec<String> = vocab.into_iter().map(|(t, _)| t.to_string()).collect();

    let texts = kept.iter().map(|(i, _)| docs[*i].text.clone()).collect();
    let documents = kept
        .iter()
        .map(|(i, s)| ProcessedDocument {
            id: docs[*i].id.clone(),
            tokens: s.clone(),
            time_index: bins.index[&docs[*i].timestamp],
        })
        .collect();
    ProcessedCorpus::from_parts(documents, vocab, bins.labels, Some(texts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str, ts: &str) -> RawDocument {
        RawDocument {
            id: id.into(),
            text: text.into(),
            timestamp: ts.into(),
        }
    }

    #[test]
    fn tokenize_examples() {
        let cfg = IngestConfig::default().with_stopwords(["the", "new"]);
        assert_eq!(
            tokenize_doc("The RBI issued new rules.", &cfg),
            vec!["rbi", "issued", "rules"]
        );
        assert!(tokenize_doc("", &cfg).is_empty());
        assert!(tokenize_doc("a b c", &cfg).is_empty());
    }

    #[test]
    fn tokenize_keeps_underscores_and_inner_punctuation() {
        let cfg = IngestConfig::default();
        assert_eq!(tokenize_doc("(debit_card) covid-19!", &cfg), vec!["debit_card", "covid-19"]);
        let raw = IngestConfig {
            remove_punctuation: false,
            ..IngestConfig::default()
        };
        assert_eq!(tokenize_doc("rules.", &raw), vec!["rules."]);
    }

    #[test]
    fn bigram_worked_examples() {
        let c = BigramCounts { joint: 6, left: 8, right: 7, distinct: 100 };
        assert!((c.score(5) - 100.0 / 56.0).abs() < 1e-6);
        assert!(!c.qualifies(5, 20.0));

        let c = BigramCounts { joint: 5, left: 5, right: 5, distinct: 10_000 };
        assert_eq!(c.score(5), 0.0);
        assert!(!c.qualifies(5, 1e-9));

        let c = BigramCounts { joint: 30, left: 30, right: 30, distinct: 1000 };
        assert!((c.score(5) - 25_000.0 / 900.0).abs() < 1e-6);
        assert!(c.qualifies(5, 20.0));
    }

    #[test]
    fn detect_and_merge() {
        let mut streams = Vec::new();
        for i in 0..10 {
            streams.push(vec![
                "credit".to_string(),
                "card".to_string(),
                format!("filler{i}"),
            ]);
        }
        let cfg = IngestConfig {
            min_count_bigram: 2,
            threshold_bigram: 0.5,
            ..IngestConfig::default()
        };
        let (table, out) = detect_bigrams(&streams, &cfg);
        assert!(table.contains("credit", "card"));
        assert_eq!(out[0], vec!["credit_card", "filler0"]);
        // (credit, card): (10-2)*12/100 = 0.96; (card, fillerN) is below min_count
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn greedy_merge_is_left_to_right() {
        let mut table = PhraseTable::default();
        table.phrases.insert(("a".into(), "b".into()), 1.0);
        table.phrases.insert(("b".into(), "c".into()), 1.0);
        let s: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert_eq!(table.apply(&s), vec!["a_b", "c"]);
    }

    #[test]
    fn bins() {
        let b = bin_timestamps(&["2016", "2015", "2016"]);
        assert_eq!(b.labels, vec!["2015", "2016"]);
        assert_eq!(b.index["2015"], 0);
        assert_eq!(b.index["2016"], 1);

        let b = bin_timestamps(&["1999"]);
        assert_eq!(b.len(), 1);

        let b = bin_timestamps(&["b", "a", "c"]);
        assert_eq!(b.labels, vec!["a", "b", "c"]);

        // numeric, not lexicographic
        let b = bin_timestamps(&["10", "9", "100"]);
        assert_eq!(b.labels, vec!["9", "10", "100"]);
    }

    #[test]
    fn short_documents_are_dropped() {
        let docs = vec![
            doc("d1", "inflation rates rising sharply", "2015"),
            doc("d2", "budget deficit widened", "2016"),
            doc("d3", "the budget", "2016"),
            doc("d4", "bank lending slowed again", "2016"),
        ];
        let cfg = IngestConfig::default().with_stopwords(["the", "again"]);
        let c = preprocess_corpus(&docs[..3], &cfg).unwrap();
        assert_eq!(c.num_docs(), 2);
        let c = preprocess_corpus(&docs, &cfg).unwrap();
        assert_eq!(c.num_docs(), 3);
        assert_eq!(c.timestamps, vec!["2015", "2016"]);
        assert_eq!(c.stats.docs_per_bin[1].docs, 2);
    }

    #[test]
    fn empty_and_duplicate() {
        let cfg = IngestConfig::default().with_stopwords(["the", "and", "with"]);
        let docs = vec![doc("d1", "the and with", "1"), doc("d2", "and the", "2")];
        assert!(matches!(preprocess_corpus(&docs, &cfg), Err(IngestError::EmptyCorpus)));
        let docs = vec![doc("d1", "alpha beta gamma", "1"), doc("d1", "delta eps zeta", "2")];
        assert!(matches!(preprocess_corpus(&docs, &cfg), Err(IngestError::DuplicateId(id)) if id == "d1"));
    }

    #[test]
    fn time_index_is_contiguous_after_drops() {
        let docs = vec![
            doc("d1", "x", "2014"),
            doc("d2", "alpha beta gamma", "2015"),
            doc("d3", "alpha beta delta", "2017"),
        ];
        let c = preprocess_corpus(&docs, &IngestConfig::default()).unwrap();
        assert_eq!(c.timestamps, vec!["2015", "2017"]);
        assert_eq!(c.documents[1].time_index, 1);
    }

    #[test]
    fn vocab_order_and_pruning() {
        let docs = vec![
            doc("d1", "beta alpha alpha gamma", "1"),
            doc("d2", "beta alpha delta", "1"),
            doc("d3", "beta zeta delta", "2"),
        ];
        let cfg = IngestConfig { min_chars: 1, ..IngestConfig::default() };
        let c = preprocess_corpus(&docs, &cfg).unwrap();
        assert_eq!(c.vocab, vec!["alpha", "beta", "delta", "gamma", "zeta"]);

        let cfg = IngestConfig { min_chars: 1, min_doc_freq: Some(2), min_words_docs: 2, ..IngestConfig::default() };
        let c = preprocess_corpus(&docs, &cfg).unwrap();
        assert_eq!(c.vocab, vec!["alpha", "beta", "delta"]);
        assert_eq!(c.documents[2].tokens, vec!["beta", "delta"]);

        let cfg = IngestConfig { min_chars: 1, max_vocab: Some(1), min_words_docs: 1, ..IngestConfig::default() };
        let c = preprocess_corpus(&docs, &cfg).unwrap();
        assert_eq!(c.vocab, vec!["beta"]);
    }

    #[test]
    fn config_validation() {
        let bad = IngestConfig { threshold_bigram: 0.0, ..IngestConfig::default() };
        assert!(bad.validate().is_err());
        let bad = IngestConfig { min_count_bigram: 0, ..IngestConfig::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn write_and_load() {
        let docs = vec![
            doc("d1", "Inflation rates rising, sharply.", "2015"),
            doc("d2", "budget deficit widened further", "2016"),
        ];
        let c = preprocess_corpus(&docs, &IngestConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        c.write(dir.path()).unwrap();
        let back = ProcessedCorpus::load(dir.path()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.texts[0], "Inflation rates rising, sharply.");
        assert_eq!(back.checksum(), c.checksum());
    }
}
