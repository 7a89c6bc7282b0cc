//! The temporal topic-word tensor and its file contract.
//!
//! A model directory holds `model_meta.json` plus either `beta.f32`
//! (little-endian `f32`, row-major `[time][topic][word]`) or `beta.json`
//! (nested arrays in the same order). The vocabulary and timestamp labels
//! come from the processed corpus (`vocab.txt`, `timestamps.txt`).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{TIMESTAMPS_FILE, VOCAB_FILE};
use crate::scalar::{desc, Scalar};

pub const META_FILE: &str = "model_meta.json";
pub const BETA_F32_FILE: &str = "beta.f32";
pub const BETA_JSON_FILE: &str = "beta.json";

/// Rows whose sum is off by more than this are rejected.
pub const ROW_SUM_TOLERANCE: f64 = 1e-4;
/// Rows within this distance of 1 are kept bit-for-bit; `f32` storage noise sits well below it.
const RENORMALIZE_SLACK: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("shape mismatch: meta declares {expected} values, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("topic {topic} at time {time} is not a distribution: {reason}")]
    NotADistribution {
        time: usize,
        topic: usize,
        reason: String,
    },
    #[error("vocabulary mismatch: tensor has {expected} words, vocabulary has {found}")]
    VocabMismatch { expected: usize, found: usize },
    #[error("timestamp mismatch: tensor has {expected} times, label file has {found}")]
    TimestampMismatch { expected: usize, found: usize },
    #[error("checksum mismatch for {0}")]
    ChecksumMismatch(PathBuf),
    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    #[error("invalid model metadata: {0}")]
    InvalidMeta(String),
    #[error("missing model file {0}")]
    MissingFile(PathBuf),
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ModelError + '_ {
    move |source| ModelError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Contents of `model_meta.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub num_times: usize,
    pub num_topics: usize,
    pub vocab_size: usize,
    #[serde(default)]
    pub model_name: String,
    /// SHA-256 of the `vocab.txt` the tensor was trained against, checked when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocab_sha256: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamps_sha256: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Validated `T x K x V` tensor of per-time topic-word probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaTensor<F> {
    num_times: usize,
    num_topics: usize,
    vocab_size: usize,
    values: Vec<F>,
    pub vocab: Vec<String>,
    pub timestamps: Vec<String>,
    pub model_name: String,
    pub vocab_sha256: String,
    pub timestamps_sha256: String,
}

fn lines_bytes(lines: &[String]) -> Vec<u8> {
    let mut out = Vec::new();
    for l in lines {
        out.extend_from_slice(l.as_bytes());
        out.push(b'\n');
    }
    out
}

impl<F: Scalar> BetaTensor<F> {
    /// Builds and validates a tensor from row-major `[t][k][v]` values.
    ///
    /// Rows off by at most [`ROW_SUM_TOLERANCE`] are renormalized; rows
    /// farther off, negative or non-finite entries are rejected.
    pub fn from_values(
        num_times: usize,
        num_topics: usize,
        vocab_size: usize,
        mut values: Vec<F>,
        vocab: Vec<String>,
        timestamps: Vec<String>,
    ) -> Result<Self, ModelError> {
        if num_times == 0 || num_topics == 0 || vocab_size == 0 {
            return Err(ModelError::InvalidMeta(format!(
                "dimensions must be positive, got T={num_times} K={num_topics} V={vocab_size}"
            )));
        }
        let expected = num_times * num_topics * vocab_size;
        if values.len() != expected {
            return Err(ModelError::ShapeMismatch {
                expected,
                found: values.len(),
            });
        }
        if vocab.len() != vocab_size {
            return Err(ModelError::VocabMismatch {
                expected: vocab_size,
                found: vocab.len(),
            });
        }
        if timestamps.len() != num_times {
            return Err(ModelError::TimestampMismatch {
                expected: num_times,
                found: timestamps.len(),
            });
        }
        for (row, chunk) in values.chunks_mut(vocab_size).enumerate() {
            let (time, topic) = (row / num_topics, row % num_topics);
            let mut sum = 0.0f64;
            for (v, x) in chunk.iter().enumerate() {
                let x = x.as_f64();
                if !x.is_finite() || x < 0.0 {
                    return Err(ModelError::NotADistribution {
                        time,
                        topic,
                        reason: format!("entry {v} is {x}"),
                    });
                }
                sum += x;
            }
            let off = (sum - 1.0).abs();
            if off > ROW_SUM_TOLERANCE {
                return Err(ModelError::NotADistribution {
                    time,
                    topic,
                    reason: format!("row sums to {sum}"),
                });
            }
            if off > RENORMALIZE_SLACK {
                for x in chunk.iter_mut() {
                    *x = F::lit(x.as_f64() / sum);
                }
            }
        }
        let vocab_sha256 = sha256_hex(&lines_bytes(&vocab));
        let timestamps_sha256 = sha256_hex(&lines_bytes(&timestamps));
        Ok(Self {
            num_times,
            num_topics,
            vocab_size,
            values,
            vocab,
            timestamps,
            model_name: String::new(),
            vocab_sha256,
            timestamps_sha256,
        })
    }

    pub fn with_model_name(mut self, name: impl Into<String>) -> Self {
        self.model_name = name.into();
        self
    }

    pub fn num_times(&self) -> usize {
        self.num_times
    }

    pub fn num_topics(&self) -> usize {
        self.num_topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    #[inline]
    pub fn get(&self, t: usize, k: usize, v: usize) -> F {
        self.values[(t * self.num_topics + k) * self.vocab_size + v]
    }

    /// `β[t][k][·]`.
    pub fn row(&self, t: usize, k: usize) -> &[F] {
        let start = (t * self.num_topics + k) * self.vocab_size;
        &self.values[start..start + self.vocab_size]
    }

    pub fn check_topic(&self, k: usize) -> Result<(), ModelError> {
        check(k, self.num_topics, "topic")
    }

    pub fn check_time(&self, t: usize) -> Result<(), ModelError> {
        check(t, self.num_times, "time")
    }

    pub fn check_word(&self, v: usize) -> Result<(), ModelError> {
        check(v, self.vocab_size, "word")
    }

    pub fn word_id(&self, term: &str) -> Option<usize> {
        self.vocab.iter().position(|w| w == term)
    }

    pub fn meta(&self) -> ModelMeta {
        ModelMeta {
            num_times: self.num_times,
            num_topics: self.num_topics,
            vocab_size: self.vocab_size,
            model_name: self.model_name.clone(),
            vocab_sha256: Some(self.vocab_sha256.clone()),
            timestamps_sha256: Some(self.timestamps_sha256.clone()),
        }
    }

    /// Top `n` word ids of topic `k` at time `t`, descending, ties by ascending id.
    pub fn top_words(&self, k: usize, t: usize, n: usize) -> Result<TopWordSet<F>, ModelError> {
        self.check_topic(k)?;
        self.check_time(t)?;
        let words = top_n_ids(self.row(t, k), n);
        let probs = words.iter().map(|&v| self.get(t, k, v)).collect();
        Ok(TopWordSet {
            topic: k,
            time: t,
            words,
            probs,
        })
    }

    pub fn trajectory(&self, k: usize, v: usize) -> Result<Trajectory<F>, ModelError> {
        self.check_topic(k)?;
        self.check_word(v)?;
        Ok(Trajectory {
            topic: k,
            word: v,
            series: (0..self.num_times).map(|t| self.get(t, k, v)).collect(),
        })
    }

    /// Loads `model_meta.json` and the tensor file from `model_dir`, with
    /// `vocab.txt`/`timestamps.txt` taken from `labels_dir`.
    pub fn load_dir(model_dir: &Path, labels_dir: &Path) -> Result<Self, ModelError> {
        let meta = model_dir.join(META_FILE);
        let f32_path = model_dir.join(BETA_F32_FILE);
        let json_path = model_dir.join(BETA_JSON_FILE);
        let tensor = if f32_path.exists() || !json_path.exists() {
            f32_path
        } else {
            json_path
        };
        Self::load(
            &meta,
            &tensor,
            &labels_dir.join(VOCAB_FILE),
            &labels_dir.join(TIMESTAMPS_FILE),
        )
    }

    /// Loads a tensor. A `.json` tensor path is read as nested arrays, anything else as raw `f32`.
    pub fn load(
        meta_path: &Path,
        tensor_path: &Path,
        vocab_path: &Path,
        timestamps_path: &Path,
    ) -> Result<Self, ModelError> {
        for p in [meta_path, tensor_path, vocab_path, timestamps_path] {
            if !p.exists() {
                return Err(ModelError::MissingFile(p.to_path_buf()));
            }
        }
        let meta_bytes = fs::read(meta_path).map_err(io_err(meta_path))?;
        let meta: ModelMeta = serde_json::from_slice(&meta_bytes).map_err(|source| ModelError::Json {
            path: meta_path.to_path_buf(),
            source,
        })?;
        let vocab_bytes = fs::read(vocab_path).map_err(io_err(vocab_path))?;
        let ts_bytes = fs::read(timestamps_path).map_err(io_err(timestamps_path))?;
        if let Some(want) = &meta.vocab_sha256 {
            if *want != sha256_hex(&vocab_bytes) {
                return Err(ModelError::ChecksumMismatch(vocab_path.to_path_buf()));
            }
        }
        if let Some(want) = &meta.timestamps_sha256 {
            if *want != sha256_hex(&ts_bytes) {
                return Err(ModelError::ChecksumMismatch(timestamps_path.to_path_buf()));
            }
        }
        let vocab = split_lines(&vocab_bytes, vocab_path)?;
        let timestamps = split_lines(&ts_bytes, timestamps_path)?;

        let is_json = tensor_path.extension().is_some_and(|e| e == "json");
        let values: Vec<F> = if is_json {
            read_beta_json(tensor_path, &meta)?
        } else {
            let raw = fs::read(tensor_path).map_err(io_err(tensor_path))?;
            let expected = meta.num_times * meta.num_topics * meta.vocab_size;
            if raw.len() % 4 != 0 || raw.len() / 4 != expected {
                return Err(ModelError::ShapeMismatch {
                    expected,
                    found: raw.len() / 4,
                });
            }
            raw.chunks_exact(4)
                .map(|b| F::lit(f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64))
                .collect()
        };
        Ok(Self::from_values(
            meta.num_times,
            meta.num_topics,
            meta.vocab_size,
            values,
            vocab,
            timestamps,
        )?
        .with_model_name(meta.model_name))
    }

    /// Writes `model_meta.json` and `beta.f32` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), ModelError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let meta_path = dir.join(META_FILE);
        let mut meta = serde_json::to_vec_pretty(&self.meta()).expect("meta serializes");
        meta.push(b'\n');
        fs::write(&meta_path, meta).map_err(io_err(&meta_path))?;
        let path = dir.join(BETA_F32_FILE);
        fs::write(&path, self.to_f32_bytes()).map_err(io_err(&path))
    }

    pub fn to_f32_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.values.len() * 4);
        for x in &self.values {
            out.extend_from_slice(&(x.as_f64() as f32).to_le_bytes());
        }
        out
    }

    /// Nested `[t][k][v]` arrays, the `beta.json` form.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.num_times)
            .map(|t| {
                (0..self.num_topics)
                    .map(|k| self.row(t, k).iter().map(|x| x.as_f64()).collect())
                    .collect()
            })
            .collect()
    }
}

fn check(index: usize, size: usize, what: &'static str) -> Result<(), ModelError> {
    if index < size {
        Ok(())
    } else {
        Err(ModelError::IndexOutOfRange { what, index, size })
    }
}

fn split_lines(bytes: &[u8], path: &Path) -> Result<Vec<String>, ModelError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ModelError::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
    })?;
    Ok(text.lines().map(str::to_string).collect())
}

fn read_beta_json<F: Scalar>(path: &Path, meta: &ModelMeta) -> Result<Vec<F>, ModelError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let nested: Vec<Vec<Vec<f64>>> = serde_json::from_slice(&bytes).map_err(|source| ModelError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let expected = meta.num_times * meta.num_topics * meta.vocab_size;
    let ragged = nested.len() != meta.num_times
        || nested.iter().any(|t| {
            t.len() != meta.num_topics || t.iter().any(|k| k.len() != meta.vocab_size)
        });
    let flat: Vec<F> = nested.into_iter().flatten().flatten().map(F::lit).collect();
    if ragged || flat.len() != expected {
        return Err(ModelError::ShapeMismatch {
            expected,
            found: flat.len(),
        });
    }
    Ok(flat)
}

/// Indices of the `n` largest values, descending, ties by ascending index.
pub fn top_n_ids<F: Scalar>(row: &[F], n: usize) -> Vec<usize> {
    let n = n.min(row.len());
    let mut ids: Vec<usize> = (0..row.len()).collect();
    let cmp = |a: &usize, b: &usize| desc(row[*a], row[*b]).then(a.cmp(b));
    if n == 0 {
        return Vec::new();
    }
    if n < ids.len() {
        ids.select_nth_unstable_by(n - 1, cmp);
        ids.truncate(n);
    }
    ids.sort_by(cmp);
    ids
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopWordSet<F> {
    pub topic: usize,
    pub time: usize,
    pub words: Vec<usize>,
    pub probs: Vec<F>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<F> {
    pub topic: usize,
    pub word: usize,
    pub series: Vec<F>,
}
