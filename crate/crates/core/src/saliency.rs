//! Temporally salient words: burstiness x specificity x uniqueness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{top_n_ids, BetaTensor, ModelError};
use crate::scalar::{desc, Scalar};

/// How topic membership is decided for the uniqueness factor.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// In the top-N of the topic at any timestamp.
    #[default]
    AnyTimestamp,
    /// In the top-N of the topic's time-averaged distribution.
    TimeAveraged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct SaliencyConfig<F> {
    pub pool_size: usize,
    pub top_n_membership: usize,
    pub epsilon: F,
    pub membership: Membership,
}

impl<F: Scalar> Default for SaliencyConfig<F> {
    fn default() -> Self {
        Self {
            pool_size: 500,
            top_n_membership: 10,
            epsilon: F::lit(1e-12),
            membership: Membership::AnyTimestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct SaliencyScore<F> {
    pub topic: usize,
    pub word: usize,
    pub s_burst: F,
    pub s_spec: F,
    pub s_uniq: F,
    pub s_final: F,
}

fn peak_and_sum<F: Scalar>(beta: &BetaTensor<F>, k: usize, v: usize) -> (F, F) {
    (0..beta.num_times()).fold((F::zero(), F::zero()), |(mx, sum), t| {
        let x = beta.get(t, k, v);
        (mx.max(x), sum + x)
    })
}

fn global_mean<F: Scalar>(beta: &BetaTensor<F>, v: usize) -> F {
    let mut sum = F::zero();
    for t in 0..beta.num_times() {
        for k in 0..beta.num_topics() {
            sum = sum + beta.get(t, k, v);
        }
    }
    sum / F::from_count(beta.num_times() * beta.num_topics())
}

/// Peak over mean (plus `eps`) of a probability series.
pub fn burstiness_of<F: Scalar>(series: &[F], eps: F) -> F {
    let (peak, sum) = series
        .iter()
        .fold((F::zero(), F::zero()), |(mx, s), &x| (mx.max(x), s + x));
    peak / (sum / F::from_count(series.len().max(1)) + eps)
}

/// Peak over time divided by mean over time (plus `eps`) within topic `k`.
pub fn score_burstiness<F: Scalar>(beta: &BetaTensor<F>, k: usize, v: usize, eps: F) -> Result<F, ModelError> {
    beta.check_topic(k)?;
    beta.check_word(v)?;
    let series: Vec<F> = (0..beta.num_times()).map(|t| beta.get(t, k, v)).collect();
    Ok(burstiness_of(&series, eps))
}

/// Peak in topic `k` divided by the mean over every (time, topic) cell (plus `eps`).
pub fn score_specificity<F: Scalar>(beta: &BetaTensor<F>, k: usize, v: usize, eps: F) -> Result<F, ModelError> {
    beta.check_topic(k)?;
    beta.check_word(v)?;
    let (peak, _) = peak_and_sum(beta, k, v);
    Ok(peak / (global_mean(beta, v) + eps))
}

/// Number of topics containing each word in their top-`n`, for every word.
pub fn membership_counts<F: Scalar>(beta: &BetaTensor<F>, n: usize, mode: Membership) -> Vec<usize> {
    let mut counts = vec![0usize; beta.vocab_size()];
    let mut seen = vec![usize::MAX; beta.vocab_size()];
    for k in 0..beta.num_topics() {
        let members: Vec<usize> = match mode {
            Membership::AnyTimestamp => (0..beta.num_times())
                .flat_map(|t| top_n_ids(beta.row(t, k), n))
                .collect(),
            Membership::TimeAveraged => {
                let mut avg = vec![F::zero(); beta.vocab_size()];
                for t in 0..beta.num_times() {
                    for (a, &x) in avg.iter_mut().zip(beta.row(t, k)) {
                        *a = *a + x;
                    }
                }
                top_n_ids(&avg, n)
            }
        };
        for v in members {
            if seen[v] != k {
                seen[v] = k;
                counts[v] += 1;
            }
        }
    }
    counts
}

fn uniqueness_from_count<F: Scalar>(num_topics: usize, members: usize) -> F {
    (F::from_count(num_topics) / F::from_count(members.max(1))).ln()
}

/// `ln(K / max(m, 1))` where `m` counts topics with `v` in their top-`n` at any time.
pub fn score_uniqueness<F: Scalar>(beta: &BetaTensor<F>, v: usize, n: usize) -> Result<F, ModelError> {
    beta.check_word(v)?;
    let counts = membership_counts(beta, n, Membership::AnyTimestamp);
    Ok(uniqueness_from_count(beta.num_topics(), counts[v]))
}

/// Top `pool_size` words of topic `k` by peak probability over time, ties by ascending id.
pub fn candidate_pool<F: Scalar>(beta: &BetaTensor<F>, k: usize, pool_size: usize) -> Vec<usize> {
    let peaks: Vec<F> = (0..beta.vocab_size()).map(|v| peak_and_sum(beta, k, v).0).collect();
    top_n_ids(&peaks, pool_size)
}

/// Scores the candidate pool of topic `k` and returns the best `limit`
/// words by `s_final`, ties by ascending word id.
pub fn rank_salient<F: Scalar>(
    beta: &BetaTensor<F>,
    k: usize,
    cfg: &SaliencyConfig<F>,
    limit: usize,
) -> Result<Vec<SaliencyScore<F>>, ModelError> {
    beta.check_topic(k)?;
    let counts = membership_counts(beta, cfg.top_n_membership, cfg.membership);
    let times = F::from_count(beta.num_times());
    let mut scored: Vec<SaliencyScore<F>> = candidate_pool(beta, k, cfg.pool_size)
        .into_par_iter()
        .map(|v| {
            let (peak, sum) = peak_and_sum(beta, k, v);
            let s_burst = peak / (sum / times + cfg.epsilon);
            let s_spec = peak / (global_mean(beta, v) + cfg.epsilon);
            let s_uniq = uniqueness_from_count(beta.num_topics(), counts[v]);
            SaliencyScore {
                topic: k,
                word: v,
                s_burst,
                s_spec,
                s_uniq,
                s_final: s_burst * s_spec * s_uniq,
            }
        })
        .collect();
    scored.sort_by(|a, b| desc(a.s_final, b.s_final).then(a.word.cmp(&b.word)));
    scored.truncate(limit);
    Ok(scored)
}
