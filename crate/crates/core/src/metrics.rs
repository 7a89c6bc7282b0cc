//! Temporal topic quality: NPMI over boolean document co-occurrence, and the
//! per-topic coherence (TTC), smoothness (TTS) and quality (TTQ = TTC * TTS).

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::ProcessedCorpus;
use crate::model::{BetaTensor, ModelError};
use crate::scalar::Scalar;

pub const DEFAULT_TOP_N: usize = 10;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("term id {0} is not in the vocabulary")]
    UnknownTerm(usize),
    #[error("term id {0} never occurs in the reference corpus")]
    UndefinedTerm(usize),
    #[error("tensor and corpus vocabularies differ")]
    VocabMismatch,
    #[error("top_n must be >= 1")]
    ZeroTopN,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Document frequencies and pairwise joint document frequencies over a term set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CooccurrenceStats {
    pub num_docs: usize,
    df: HashMap<usize, usize>,
    jdf: HashMap<(usize, usize), usize>,
}

impl CooccurrenceStats {
    pub fn df(&self, term: usize) -> usize {
        self.df.get(&term).copied().unwrap_or(0)
    }

    /// Symmetric joint document frequency; `jdf(a, a) == df(a)`.
    pub fn jdf(&self, a: usize, b: usize) -> usize {
        if a == b {
            return self.df(a);
        }
        let key = if a < b { (a, b) } else { (b, a) };
        self.jdf.get(&key).copied().unwrap_or(0)
    }

    fn merge(mut self, other: Self) -> Self {
        self.num_docs += other.num_docs;
        for (k, n) in other.df {
            *self.df.entry(k).or_default() += n;
        }
        for (k, n) in other.jdf {
            *self.jdf.entry(k).or_default() += n;
        }
        self
    }
}

/// Counts, per document, which of `terms` are present (whole-document window).
pub fn cooccurrence_stats(
    corpus: &ProcessedCorpus,
    terms: impl IntoIterator<Item = usize>,
) -> Result<CooccurrenceStats, MetricsError> {
    let terms: BTreeSet<usize> = terms.into_iter().collect();
    if let Some(&bad) = terms.iter().find(|&&t| t >= corpus.vocab.len()) {
        return Err(MetricsError::UnknownTerm(bad));
    }
    let stats = corpus
        .documents
        .par_iter()
        .fold(CooccurrenceStats::default, |mut acc, doc| {
            acc.num_docs += 1;
            let present: BTreeSet<usize> = doc
                .tokens
                .iter()
                .filter_map(|t| corpus.term_id(t))
                .filter(|id| terms.contains(id))
                .collect();
            let present: Vec<usize> = present.into_iter().collect();
            for (i, &a) in present.iter().enumerate() {
                *acc.df.entry(a).or_default() += 1;
                for &b in &present[i + 1..] {
                    *acc.jdf.entry((a, b)).or_default() += 1;
                }
            }
            acc
        })
        .reduce(CooccurrenceStats::default, CooccurrenceStats::merge);
    Ok(stats)
}

/// Normalized PMI of two terms.
///
/// `-1` when the terms never co-occur, `1` for a term with itself or when
/// both occur in every document.
pub fn npmi<F: Scalar>(stats: &CooccurrenceStats, a: usize, b: usize) -> Result<F, MetricsError> {
    let (df_a, df_b) = (stats.df(a), stats.df(b));
    if df_a == 0 {
        return Err(MetricsError::UndefinedTerm(a));
    }
    if df_b == 0 {
        return Err(MetricsError::UndefinedTerm(b));
    }
    if a == b {
        return Ok(F::one());
    }
    let joint = stats.jdf(a, b);
    if joint == 0 {
        return Ok(-F::one());
    }
    let d = stats.num_docs;
    if joint == d {
        return Ok(F::one());
    }
    // integer products keep the perfect co-occurrence case exactly at 1
    let pmi = (F::from_count(joint * d) / F::from_count(df_a * df_b)).ln();
    let norm = (F::from_count(d) / F::from_count(joint)).ln();
    let x = pmi / norm;
    Ok(x.max(-F::one()).min(F::one()))
}

fn effective_n<F: Scalar>(beta: &BetaTensor<F>, n: usize) -> Result<usize, MetricsError> {
    if n == 0 {
        return Err(MetricsError::ZeroTopN);
    }
    Ok(n.min(beta.vocab_size()))
}

/// Mean adjacent-time overlap of the top-`n` sets, normalized by `n`. `1` when `T == 1`.
pub fn tts_topic<F: Scalar>(beta: &BetaTensor<F>, k: usize, n: usize) -> Result<F, MetricsError> {
    beta.check_topic(k)?;
    let n = effective_n(beta, n)?;
    let t_count = beta.num_times();
    if t_count < 2 {
        return Ok(F::one());
    }
    let sets: Vec<BTreeSet<usize>> = (0..t_count)
        .map(|t| beta.top_words(k, t, n).map(|s| s.words.into_iter().collect()))
        .collect::<Result<_, _>>()?;
    let total: F = sets
        .windows(2)
        .map(|w| F::from_count(w[0].intersection(&w[1]).count()) / F::from_count(n))
        .sum();
    Ok(total / F::from_count(t_count - 1))
}

/// Mean NPMI over ordered cross pairs of adjacent top-`n` sets, averaged over
/// adjacent time pairs. With one timestamp, mean pairwise NPMI inside the set.
pub fn ttc_topic<F: Scalar>(
    beta: &BetaTensor<F>,
    stats: &CooccurrenceStats,
    k: usize,
    n: usize,
) -> Result<F, MetricsError> {
    beta.check_topic(k)?;
    let n = effective_n(beta, n)?;
    let t_count = beta.num_times();
    let sets: Vec<Vec<usize>> = (0..t_count)
        .map(|t| beta.top_words(k, t, n).map(|s| s.words))
        .collect::<Result<_, _>>()?;
    if t_count < 2 {
        return within_set_coherence(stats, &sets[0]);
    }
    adjacent_coherence(&sets, |a, b| npmi::<F>(stats, a, b))
}

/// Averages `pair(a, b)` over ordered cross pairs of each adjacent pair of
/// word sets, then over the adjacent pairs. Needs at least two sets.
pub fn adjacent_coherence<F, E>(
    sets: &[Vec<usize>],
    mut pair: impl FnMut(usize, usize) -> Result<F, E>,
) -> Result<F, E>
where
    F: Scalar,
{
    let mut total = F::zero();
    for w in sets.windows(2) {
        let mut pair_sum = F::zero();
        for &a in &w[0] {
            for &b in &w[1] {
                pair_sum = pair_sum + pair(a, b)?;
            }
        }
        total = total + pair_sum / F::from_count((w[0].len() * w[1].len()).max(1));
    }
    Ok(total / F::from_count(sets.len().saturating_sub(1).max(1)))
}

/// Mean NPMI over unordered pairs; `0` for a single word.
pub fn within_set_coherence<F: Scalar>(stats: &CooccurrenceStats, words: &[usize]) -> Result<F, MetricsError> {
    let mut sum = F::zero();
    let mut pairs = 0usize;
    for (i, &a) in words.iter().enumerate() {
        for &b in &words[i + 1..] {
            sum = sum + npmi::<F>(stats, a, b)?;
            pairs += 1;
        }
    }
    if pairs == 0 {
        // a lone word still has to exist in the corpus
        for &a in words {
            npmi::<F>(stats, a, a)?;
        }
        return Ok(F::zero());
    }
    Ok(sum / F::from_count(pairs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TopicQuality<F> {
    pub topic: usize,
    pub ttc: F,
    pub tts: F,
    pub ttq: F,
}

/// Per-topic and aggregate temporal quality. Aggregates are means of the per-topic values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TemporalQuality<F> {
    pub top_n: usize,
    pub per_topic: Vec<TopicQuality<F>>,
    pub ttc: F,
    pub tts: F,
    pub ttq: F,
}

impl<F: Scalar> TemporalQuality<F> {
    /// Composes `(ttc_k, tts_k)` pairs: `ttq_k = ttc_k * tts_k`, aggregates are arithmetic means.
    pub fn from_per_topic(top_n: usize, scores: impl IntoIterator<Item = (F, F)>) -> Self {
        let per_topic: Vec<TopicQuality<F>> = scores
            .into_iter()
            .enumerate()
            .map(|(topic, (ttc, tts))| TopicQuality {
                topic,
                ttc,
                tts,
                ttq: ttc * tts,
            })
            .collect();
        let count = F::from_count(per_topic.len().max(1));
        let mean = |f: fn(&TopicQuality<F>) -> F| per_topic.iter().map(f).sum::<F>() / count;
        Self {
            top_n,
            ttc: mean(|q| q.ttc),
            tts: mean(|q| q.tts),
            ttq: mean(|q| q.ttq),
            per_topic,
        }
    }
}

/// Every word that appears in some topic's top-`n` at some time.
pub fn top_word_union<F: Scalar>(beta: &BetaTensor<F>, n: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for t in 0..beta.num_times() {
        for k in 0..beta.num_topics() {
            out.extend(crate::model::top_n_ids(beta.row(t, k), n));
        }
    }
    out
}

/// Evaluates every topic of `beta` against `corpus`.
pub fn ttq<F: Scalar>(
    beta: &BetaTensor<F>,
    corpus: &ProcessedCorpus,
    n: usize,
) -> Result<TemporalQuality<F>, MetricsError> {
    if beta.vocab != corpus.vocab {
        return Err(MetricsError::VocabMismatch);
    }
    let n_eff = effective_n(beta, n)?;
    let stats = cooccurrence_stats(corpus, top_word_union(beta, n_eff))?;
    let scores = (0..beta.num_topics())
        .into_par_iter()
        .map(|k| Ok((ttc_topic(beta, &stats, k, n_eff)?, tts_topic(beta, k, n_eff)?)))
        .collect::<Result<Vec<_>, MetricsError>>()?;
    Ok(TemporalQuality::from_per_topic(n, scores))
}
