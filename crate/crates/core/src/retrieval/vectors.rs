use std::collections::BTreeMap;

use crate::corpus::ProcessedCorpus;
use crate::scalar::Scalar;

/// Anything MMR can compare. Implementations return cosine similarity.
pub trait Embedding<F> {
    fn cosine(&self, other: &Self) -> F;
}

/// Sparse vector with entries sorted by term id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector<F> {
    pub entries: Vec<(usize, F)>,
}

impl<F: Scalar> SparseVector<F> {
    pub fn from_map(map: BTreeMap<usize, F>) -> Self {
        Self {
            entries: map.into_iter().filter(|(_, w)| *w != F::zero()).collect(),
        }
    }

    /// Unit vector along one term axis.
    pub fn axis(term: usize) -> Self {
        Self {
            entries: vec![(term, F::one())],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight(&self, term: usize) -> F {
        self.entries
            .binary_search_by_key(&term, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or_else(|_| F::zero())
    }

    pub fn norm(&self) -> F {
        self.entries.iter().map(|&(_, w)| w * w).sum::<F>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> F {
        let (mut i, mut j) = (0, 0);
        let mut acc = F::zero();
        while i < self.entries.len() && j < other.entries.len() {
            let (a, x) = self.entries[i];
            let (b, y) = other.entries[j];
            match a.cmp(&b) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc = acc + x * y;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > F::zero() {
            for e in &mut self.entries {
                e.1 = e.1 / n;
            }
        }
        self
    }

    /// Normalized mean of several vectors.
    pub fn centroid<'a>(vectors: impl IntoIterator<Item = &'a Self>) -> Self {
        let mut acc: BTreeMap<usize, F> = BTreeMap::new();
        for v in vectors {
            for &(t, w) in &v.entries {
                let e = acc.entry(t).or_insert_with(F::zero);
                *e = *e + w;
            }
        }
        Self::from_map(acc).normalized()
    }
}

impl<F: Scalar> Embedding<F> for SparseVector<F> {
    fn cosine(&self, other: &Self) -> F {
        let denom = self.norm() * other.norm();
        if denom == F::zero() {
            return F::zero();
        }
        self.dot(other) / denom
    }
}

impl<F: Scalar> Embedding<F> for Vec<F> {
    fn cosine(&self, other: &Self) -> F {
        let dot: F = self.iter().zip(other).map(|(&a, &b)| a * b).sum();
        let na: F = self.iter().map(|&a| a * a).sum::<F>().sqrt();
        let nb: F = other.iter().map(|&b| b * b).sum::<F>().sqrt();
        if na == F::zero() || nb == F::zero() {
            return F::zero();
        }
        dot / (na * nb)
    }
}

/// l2-normalized TF-IDF vectors with raw-count tf and `idf = ln(D / df)`.
#[derive(Debug, Clone)]
pub struct TfIdf<F> {
    pub idf: Vec<F>,
    pub docs: Vec<SparseVector<F>>,
}

impl<F: Scalar> TfIdf<F> {
    pub fn fit(corpus: &ProcessedCorpus) -> Self {
        let mut df = vec![0usize; corpus.vocab.len()];
        let counts: Vec<BTreeMap<usize, usize>> = corpus
            .documents
            .iter()
            .map(|d| {
                let mut c = BTreeMap::new();
                for t in &d.tokens {
                    if let Some(id) = corpus.term_id(t) {
                        *c.entry(id).or_insert(0) += 1;
                    }
                }
                for &id in c.keys() {
                    df[id] += 1;
                }
                c
            })
            .collect();
        let total = F::from_count(corpus.num_docs());
        let idf: Vec<F> = df
            .iter()
            .map(|&n| if n == 0 { F::zero() } else { (total / F::from_count(n)).ln() })
            .collect();
        let docs = counts
            .into_iter()
            .map(|c| {
                SparseVector::from_map(
                    c.into_iter()
                        .map(|(id, tf)| (id, F::from_count(tf) * idf[id]))
                        .collect(),
                )
                .normalized()
            })
            .collect();
        Self { idf, docs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_and_dot() {
        let a = SparseVector::<f64> { entries: vec![(0, 3.0), (2, 4.0)] };
        let b = SparseVector { entries: vec![(2, 1.0)] };
        assert_eq!(a.norm(), 5.0);
        assert!((a.cosine(&b) - 0.8).abs() < 1e-12);
        assert_eq!(a.weight(1), 0.0);
        let z = SparseVector::<f64>::default();
        assert_eq!(a.cosine(&z), 0.0);
        assert!((vec![1.0, 0.0].cosine(&vec![1.0, 1.0]) - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
