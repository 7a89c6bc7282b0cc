//! Word/timestamp document retrieval: inverted index, TF-IDF relevance,
//! MMR diversification and highlight spans.

mod highlight;
mod index;
mod mmr;
mod vectors;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use highlight::highlight;
pub use index::{CacheStatus, InvertedIndex, INDEX_CACHE_FILE};
pub use mmr::mmr_select;
pub use vectors::{Embedding, SparseVector, TfIdf};

use crate::corpus::ProcessedCorpus;
use crate::scalar::{desc, Scalar};

pub const DEFAULT_LAMBDA: f64 = 0.7;
pub const DEFAULT_LIMIT: usize = 20;
pub const DEFAULT_CANDIDATES: usize = 200;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("time index {index} out of range ({size} timestamps)")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("invalid retrieval parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown document `{0}`")]
    UnknownDocument(String),
    #[error("corrupt index cache: {0}")]
    CorruptCache(String),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
}

/// What the MMR relevance term compares documents against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryVector {
    /// The query word's own axis in TF-IDF space.
    #[default]
    WordAxis,
    /// Normalized centroid of the candidate documents.
    CandidateCentroid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct RetrievalResult<F> {
    pub doc_id: String,
    pub relevance: F,
    pub highlights: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct RetrieveParams<F> {
    pub candidates: usize,
    pub lambda: F,
    pub limit: usize,
    pub query: QueryVector,
}

impl<F: Scalar> Default for RetrieveParams<F> {
    fn default() -> Self {
        Self {
            candidates: DEFAULT_CANDIDATES,
            lambda: F::lit(DEFAULT_LAMBDA),
            limit: DEFAULT_LIMIT,
            query: QueryVector::WordAxis,
        }
    }
}

/// Corpus plus index plus TF-IDF vectors; read-only once built.
#[derive(Debug, Clone)]
pub struct Retriever<F> {
    pub corpus: ProcessedCorpus,
    pub index: InvertedIndex,
    pub tfidf: TfIdf<F>,
    doc_pos: HashMap<String, usize>,
}

impl<F: Scalar> Retriever<F> {
    pub fn new(corpus: ProcessedCorpus, index: InvertedIndex) -> Self {
        let tfidf = TfIdf::fit(&corpus);
        let doc_pos = corpus
            .documents
            .iter()
            .enumerate()
            .map(|(i, d)| (d.id.clone(), i))
            .collect();
        Self {
            corpus,
            index,
            tfidf,
            doc_pos,
        }
    }

    pub fn build(corpus: ProcessedCorpus) -> Self {
        let index = InvertedIndex::build(&corpus);
        Self::new(corpus, index)
    }

    /// Uses `<dir>/index.cache` when it matches the corpus.
    pub fn build_cached(corpus: ProcessedCorpus, cache_dir: &Path) -> Result<(Self, CacheStatus), RetrievalError> {
        let (index, status) = InvertedIndex::build_or_load(&corpus, &cache_dir.join(INDEX_CACHE_FILE))?;
        Ok((Self::new(corpus, index), status))
    }

    pub fn doc_position(&self, id: &str) -> Option<usize> {
        self.doc_pos.get(id).copied()
    }

    pub fn doc_text(&self, id: &str) -> Option<&str> {
        self.doc_position(id).map(|i| self.corpus.texts[i].as_str())
    }

    fn check_time(&self, t: usize) -> Result<(), RetrievalError> {
        if t >= self.corpus.num_times() {
            return Err(RetrievalError::IndexOutOfRange {
                index: t,
                size: self.corpus.num_times(),
            });
        }
        Ok(())
    }

    /// Posting list for `(word, t)` ordered by the word's TF-IDF weight,
    /// descending, ties by id, truncated to `cap`. Unknown words give an empty list.
    pub fn candidates(&self, word: &str, t: usize, cap: usize) -> Result<Vec<(String, F)>, RetrievalError> {
        self.check_time(t)?;
        if cap == 0 {
            return Err(RetrievalError::InvalidParameter("candidate cap must be >= 1".into()));
        }
        let Some(term) = self.corpus.term_id(word) else {
            return Ok(Vec::new());
        };
        let mut scored: Vec<(String, F)> = self
            .index
            .posting(word, t)
            .iter()
            .map(|id| {
                let pos = self.doc_pos[id];
                (id.clone(), self.tfidf.docs[pos].weight(term))
            })
            .collect();
        scored.sort_by(|a, b| desc(a.1, b.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(cap);
        Ok(scored)
    }

    /// candidates, then MMR, then highlighting.
    pub fn retrieve(&self, word: &str, t: usize, params: &RetrieveParams<F>) -> Result<Vec<RetrievalResult<F>>, RetrievalError> {
        if params.lambda < F::zero() || params.lambda > F::one() {
            return Err(RetrievalError::InvalidParameter("lambda must lie in [0, 1]".into()));
        }
        if params.limit == 0 {
            return Err(RetrievalError::InvalidParameter("limit must be >= 1".into()));
        }
        let cands = self.candidates(word, t, params.candidates)?;
        if cands.is_empty() {
            return Ok(Vec::new());
        }
        let vecs: Vec<(&str, SparseVector<F>)> = cands
            .iter()
            .map(|(id, _)| (id.as_str(), self.tfidf.docs[self.doc_pos[id]].clone()))
            .collect();
        let query = match params.query {
            QueryVector::WordAxis => {
                let term = self.corpus.term_id(word).expect("candidates exist only for known words");
                SparseVector::axis(term)
            }
            QueryVector::CandidateCentroid => SparseVector::centroid(vecs.iter().map(|(_, v)| v)),
        };
        let order = mmr_select(&query, &vecs, params.lambda, params.limit);
        Ok(order
            .into_iter()
            .map(|i| {
                let (id, relevance) = &cands[i];
                let text = self.doc_text(id).unwrap_or_default();
                RetrievalResult {
                    doc_id: id.clone(),
                    relevance: *relevance,
                    highlights: highlight(text, word),
                }
            })
            .collect())
    }
}
