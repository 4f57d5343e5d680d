//! Ranking evaluation by mean reciprocal rank.

mod baseline;
mod breakdown;
mod report;
mod sweep;

use rayon::prelude::*;

use crate::dataset::{MatchDataset, MatchQuery};
use crate::error::{Error, Result};
use crate::seed;

pub use baseline::{harmonic_over_n, random_baseline_mrr, BaselineMode};
pub use breakdown::{
    default_bucket_edges, mrr_by_candidate_bucket, mrr_by_type, rank2_same_type_fraction, BoxSummary, BucketRow,
    Rank2Summary, TypeRow, TypeTable,
};
pub use report::{evaluate, EvalOptions, EvalReport, ReportMeta};
pub use sweep::{default_repeats, training_size_sweep, SweepConfig, SweepCurve, SweepPoint, DEFAULT_PERCENTS};

/// Scores every candidate of a query; higher means more likely the match.
pub trait Scorer: Sync {
    fn scores(&self, query: &MatchQuery) -> Result<Vec<f64>>;
}

impl<F> Scorer for F
where
    F: Fn(&MatchQuery) -> Vec<f64> + Sync,
{
    fn scores(&self, query: &MatchQuery) -> Result<Vec<f64>> {
        Ok(self(query))
    }
}

/// Ground-truth scorer: 1 for the positive, 0 otherwise.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleScorer;

impl Scorer for OracleScorer {
    fn scores(&self, q: &MatchQuery) -> Result<Vec<f64>> {
        Ok((0..q.candidates.len()).map(|i| if i == q.positive { 1.0 } else { 0.0 }).collect())
    }
}

/// Uniform pseudo-random scores, a pure function of (seed, query, candidate).
#[derive(Debug, Clone, Copy)]
pub struct RandomScorer {
    pub seed: u64,
}

impl Scorer for RandomScorer {
    fn scores(&self, q: &MatchQuery) -> Result<Vec<f64>> {
        let qh = seed::fnv1a(q.query.as_bytes()) ^ self.seed;
        Ok(q.candidates
            .iter()
            .map(|c| (seed::mix64(qh ^ seed::mix64(seed::fnv1a(c.as_bytes()))) >> 11) as f64 / (1u64 << 53) as f64)
            .collect())
    }
}

pub fn reciprocal_rank(rank: usize) -> Result<f64> {
    if rank < 1 {
        return Err(Error::Data("rank must be at least 1".into()));
    }
    Ok(1.0 / rank as f64)
}

/// Candidate indices by descending score; ties keep input order.
pub fn rank_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// Outcome of ranking one query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    /// 1-based rank of the positive.
    pub rank: usize,
    /// Candidate index placed first.
    pub top: usize,
    /// Candidate index placed second, if any.
    pub second: Option<usize>,
    pub candidates: usize,
}

impl QueryOutcome {
    pub fn reciprocal_rank(&self) -> f64 {
        1.0 / self.rank as f64
    }
}

pub fn rank_query(scorer: &dyn Scorer, q: &MatchQuery) -> Result<QueryOutcome> {
    let scores = scorer.scores(q)?;
    if scores.len() != q.candidates.len() {
        return Err(Error::Data(format!("scorer returned {} scores for {} candidates", scores.len(), q.candidates.len())));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Data(format!("NaN score for query {}", q.query)));
    }
    let order = rank_order(&scores);
    let rank = order.iter().position(|&i| i == q.positive).expect("positive index in range") + 1;
    Ok(QueryOutcome { rank, top: order[0], second: order.get(1).copied(), candidates: q.candidates.len() })
}

/// Ranks every query (in parallel; results in dataset order).
pub fn rank_queries(scorer: &dyn Scorer, ds: &MatchDataset) -> Result<Vec<QueryOutcome>> {
    ds.queries.par_iter().map(|q| rank_query(scorer, q)).collect()
}

/// Mean of `1/rank` in query order; `None` for an empty slice.
pub fn mean_rr(outcomes: &[QueryOutcome]) -> Option<f64> {
    if outcomes.is_empty() {
        return None;
    }
    Some(outcomes.iter().map(QueryOutcome::reciprocal_rank).sum::<f64>() / outcomes.len() as f64)
}

pub fn mean_reciprocal_rank(scorer: &dyn Scorer, ds: &MatchDataset) -> Result<f64> {
    mean_rr(&rank_queries(scorer, ds)?).ok_or_else(|| Error::Data("cannot evaluate an empty dataset".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn query(id: &str, n: usize, positive: usize) -> MatchQuery {
        MatchQuery {
            query: id.to_string(),
            name: format!("name of {id}"),
            candidates: (0..n).map(|i| format!("{id}/c{i}")).collect(),
            positive,
        }
    }

    #[test]
    fn reciprocal_rank_examples() {
        assert_eq!(reciprocal_rank(1).unwrap(), 1.0);
        assert_eq!(reciprocal_rank(4).unwrap(), 0.25);
        assert!(reciprocal_rank(0).is_err());
    }

    #[test]
    fn two_queries() {
        // positive ranked 1st and 2nd
        let ds = MatchDataset::new("t", vec![query("a", 3, 0), query("b", 3, 1)]);
        let scorer = |q: &MatchQuery| if q.query == "a" { vec![0.9, 0.1, 0.0] } else { vec![0.9, 0.5, 0.1] };
        assert_eq!(mean_reciprocal_rank(&scorer, &ds).unwrap(), 0.75);
    }

    #[test]
    fn oracle_is_perfect() {
        let ds = MatchDataset::new("t", (0..20).map(|i| query(&format!("q{i}"), 2 + i % 7, i % 2)).collect());
        assert_eq!(mean_reciprocal_rank(&OracleScorer, &ds).unwrap(), 1.0);
    }

    #[test]
    fn ties_keep_input_order() {
        assert_eq!(rank_order(&[0.5, 0.5, 0.5, 0.5]), vec![0, 1, 2, 3]);
        assert_eq!(rank_order(&[0.1, 0.7, 0.7, 0.2]), vec![1, 2, 3, 0]);
        let q = query("x", 4, 2);
        let flat = |_: &MatchQuery| vec![0.5; 4];
        assert_eq!(rank_query(&flat, &q).unwrap().rank, 3);
    }

    #[test]
    fn empty_dataset_and_bad_scores() {
        assert!(mean_reciprocal_rank(&OracleScorer, &MatchDataset::default()).is_err());
        let ds = MatchDataset::new("t", vec![query("a", 3, 0)]);
        assert!(mean_reciprocal_rank(&|_: &MatchQuery| vec![1.0], &ds).is_err());
        assert!(mean_reciprocal_rank(&|_: &MatchQuery| vec![1.0, f64::NAN, 0.0], &ds).is_err());
    }

    #[test]
    fn random_scorer_is_deterministic() {
        let q = query("a", 5, 0);
        let s = RandomScorer { seed: 3 };
        assert_eq!(s.scores(&q).unwrap(), s.scores(&q).unwrap());
        assert_ne!(s.scores(&q).unwrap(), RandomScorer { seed: 4 }.scores(&q).unwrap());
        assert!(s.scores(&q).unwrap().iter().all(|x| (0.0..1.0).contains(x)));
    }
}
