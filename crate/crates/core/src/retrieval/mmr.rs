use super::vectors::Embedding;
use crate::scalar::Scalar;

/// Greedy maximal marginal relevance.
///
/// Each round picks the unselected candidate maximizing
/// `lambda * cos(d, query) - (1 - lambda) * max_{s in selected} cos(d, s)`,
/// with the max over an empty selection taken as 0. Ties go to the more
/// relevant candidate, then to the smaller id.
/// Returns indices into `candidates`.
pub fn mmr_select<F, E, I>(query: &E, candidates: &[(I, E)], lambda: F, m: usize) -> Vec<usize>
where
    F: Scalar,
    E: Embedding<F>,
    I: Ord,
{
    let relevance: Vec<F> = candidates.iter().map(|(_, e)| e.cosine(query)).collect();
    // running max similarity of each candidate to the selected set
    let mut redundancy: Vec<Option<F>> = vec![None; candidates.len()];
    let mut taken = vec![false; candidates.len()];
    let mut order = Vec::with_capacity(m.min(candidates.len()));
    while order.len() < m {
        let mut best: Option<(usize, F)> = None;
        for i in 0..candidates.len() {
            if taken[i] {
                continue;
            }
            let penalty = redundancy[i].unwrap_or_else(F::zero);
            let score = lambda * relevance[i] - (F::one() - lambda) * penalty;
            let better = match best {
                None => true,
                Some((j, s)) => {
                    score > s
                        || (score == s
                            && (relevance[i] > relevance[j]
                                || (relevance[i] == relevance[j] && candidates[i].0 < candidates[j].0)))
                }
            };
            if better {
                best = Some((i, score));
            }
        }
        let Some((pick, _)) = best else { break };
        taken[pick] = true;
        order.push(pick);
        for i in 0..candidates.len() {
            if !taken[i] {
                let sim = candidates[i].1.cosine(&candidates[pick].1);
                redundancy[i] = Some(match redundancy[i] {
                    Some(r) => r.max(sim),
                    None => sim,
                });
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vec<f64> {
        x.to_vec()
    }

    #[test]
    fn lambda_one_is_relevance_order() {
        let q = v(&[1.0, 0.0]);
        let c = vec![
            ("a", v(&[0.2, 1.0])),
            ("b", v(&[1.0, 0.1])),
            ("c", v(&[1.0, 1.0])),
        ];
        assert_eq!(mmr_select(&q, &c, 1.0, 3), vec![1, 2, 0]);
    }

    #[test]
    fn duplicate_goes_last() {
        let q = v(&[1.0, 0.0, 0.0]);
        let c = vec![
            ("d1", v(&[1.0, 0.2, 0.0])),
            ("d2", v(&[1.0, 0.2, 0.0])),
            ("d3", v(&[0.6, 0.0, 1.0])),
        ];
        let order = mmr_select(&q, &c, 0.5, 3);
        assert_eq!(order, vec![0, 2, 1]);
    }

    #[test]
    fn stops_at_m_or_exhaustion() {
        let q = v(&[1.0]);
        let c = vec![(1, v(&[1.0])), (2, v(&[0.5]))];
        assert_eq!(mmr_select(&q, &c, 0.7, 1).len(), 1);
        assert_eq!(mmr_select(&q, &c, 0.7, 10).len(), 2);
        let none: Vec<(i32, Vec<f64>)> = Vec::new();
        assert!(mmr_select(&q, &none, 0.7, 3).is_empty());
    }

    #[test]
    fn ties_break_on_id() {
        let q = v(&[1.0]);
        let c = vec![("b", v(&[1.0])), ("a", v(&[1.0]))];
        assert_eq!(mmr_select(&q, &c, 1.0, 2), vec![1, 0]);
    }

    #[test]
    fn zero_lambda_still_opens_with_the_most_relevant() {
        let q = v(&[1.0, 0.0]);
        let c = vec![(0, v(&[0.1, 1.0])), (1, v(&[1.0, 0.0])), (2, v(&[1.0, 0.5]))];
        assert_eq!(mmr_select(&q, &c, 0.0, 3)[0], 1);
    }
}
