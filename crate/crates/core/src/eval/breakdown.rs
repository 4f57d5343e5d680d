use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{mean_rr, rank_queries, QueryOutcome, Scorer};
use crate::dataset::MatchDataset;
use crate::error::{Error, Result};
use crate::typemap::TypeMap;

pub const UNKNOWN_TYPE: &str = "unknown";

/// Five-number summary of per-query reciprocal ranks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxSummary {
    /// Quartiles by linear interpolation between order statistics.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(BoxSummary { min: v[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: v[v.len() - 1] })
    }
}

/// Queries whose candidate count lies in `[lo, hi)`; `hi = None` is open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub lo: usize,
    pub hi: Option<usize>,
    pub queries: usize,
    pub mrr: Option<f64>,
    pub summary: Option<BoxSummary>,
}

impl BucketRow {
    pub fn label(&self) -> String {
        match self.hi {
            Some(hi) => format!("[{},{})", self.lo, hi),
            None => format!("[{},inf)", self.lo),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeRow {
    pub label: String,
    pub mrr: f64,
    pub queries: usize,
    pub mean_candidates: f64,
}

/// `disjoint` is false when some query carries several labels, in which
/// case row counts add up to more than the query count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeTable {
    pub rows: Vec<TypeRow>,
    pub disjoint: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rank2Summary {
    /// `None` when no positive landed at rank 2.
    pub fraction: Option<f64>,
    pub cases: usize,
}

/// Powers of two from 2 up to the first one above `max_candidates`.
pub fn default_bucket_edges(max_candidates: usize) -> Vec<usize> {
    let mut edges = vec![2];
    while *edges.last().unwrap() <= max_candidates {
        edges.push(edges.last().unwrap() * 2);
    }
    edges
}

fn check_edges(edges: &[usize]) -> Result<()> {
    if edges.is_empty() || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("bucket edges {edges:?} must be non-empty and strictly increasing")));
    }
    Ok(())
}

/// Buckets `[e_i, e_{i+1})` plus an open last bucket `[e_k, ∞)`. Queries
/// below the first edge go to a leading `[0, e_0)` row, emitted only when
/// populated, so counts always sum to the number of queries.
pub(crate) fn bucket_rows(outcomes: &[QueryOutcome], edges: &[usize]) -> Result<Vec<BucketRow>> {
    check_edges(edges)?;
    let mut bounds: Vec<(usize, Option<usize>)> = Vec::with_capacity(edges.len() + 1);
    if outcomes.iter().any(|o| o.candidates < edges[0]) {
        bounds.push((0, Some(edges[0])));
    }
    bounds.extend(edges.windows(2).map(|w| (w[0], Some(w[1]))));
    bounds.push((*edges.last().unwrap(), None));
    Ok(bounds
        .into_iter()
        .map(|(lo, hi)| {
            let members: Vec<QueryOutcome> = outcomes
                .iter()
                .filter(|o| o.candidates >= lo && hi.is_none_or(|h| o.candidates < h))
                .cloned()
                .collect();
            let rrs: Vec<f64> = members.iter().map(QueryOutcome::reciprocal_rank).collect();
            BucketRow { lo, hi, queries: members.len(), mrr: mean_rr(&members), summary: BoxSummary::of(&rrs) }
        })
        .collect())
}

pub(crate) fn type_table(ds: &MatchDataset, outcomes: &[QueryOutcome], types: &TypeMap) -> TypeTable {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut disjoint = true;
    for (i, q) in ds.queries.iter().enumerate() {
        match types.labels(&q.query) {
            Some(labels) if !labels.is_empty() => {
                disjoint &= labels.len() == 1;
                for l in labels {
                    groups.entry(l.as_str()).or_default().push(i);
                }
            }
            _ => groups.entry(UNKNOWN_TYPE).or_default().push(i),
        }
    }
    let rows = groups
        .into_iter()
        .map(|(label, idx)| {
            let rr: f64 = idx.iter().map(|&i| outcomes[i].reciprocal_rank()).sum();
            let cands: usize = idx.iter().map(|&i| outcomes[i].candidates).sum();
            TypeRow {
                label: label.to_string(),
                mrr: rr / idx.len() as f64,
                queries: idx.len(),
                mean_candidates: cands as f64 / idx.len() as f64,
            }
        })
        .collect();
    TypeTable { rows, disjoint }
}

pub(crate) fn rank2_summary(ds: &MatchDataset, outcomes: &[QueryOutcome], types: &TypeMap) -> Rank2Summary {
    let mut cases = 0;
    let mut same = 0;
    for (q, o) in ds.queries.iter().zip(outcomes) {
        if o.rank == 2 {
            cases += 1;
            if types.share_type(&q.candidates[o.top], q.positive_iri()) {
                same += 1;
            }
        }
    }
    Rank2Summary { fraction: (cases > 0).then(|| same as f64 / cases as f64), cases }
}

pub fn mrr_by_candidate_bucket(scorer: &dyn Scorer, ds: &MatchDataset, edges: &[usize]) -> Result<Vec<BucketRow>> {
    check_edges(edges)?;
    bucket_rows(&rank_queries(scorer, ds)?, edges)
}

pub fn mrr_by_type(scorer: &dyn Scorer, ds: &MatchDataset, types: &TypeMap) -> Result<TypeTable> {
    Ok(type_table(ds, &rank_queries(scorer, ds)?, types))
}

/// Among queries whose positive ranks second, the share where the top
/// candidate shares at least one type label with the positive.
pub fn rank2_same_type_fraction(scorer: &dyn Scorer, ds: &MatchDataset, types: &TypeMap) -> Result<Rank2Summary> {
    Ok(rank2_summary(ds, &rank_queries(scorer, ds)?, types))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::MatchQuery;
    use crate::eval::{OracleScorer, RandomScorer};

    fn q(id: &str, n: usize, positive: usize) -> MatchQuery {
        MatchQuery {
            query: id.into(),
            name: "x".into(),
            candidates: (0..n).map(|i| format!("{id}/c{i}")).collect(),
            positive,
        }
    }

    #[test]
    fn box_summary() {
        let s = BoxSummary::of(&[1.0, 0.5, 0.25, 1.0, 1.0 / 3.0]).unwrap();
        assert_eq!((s.min, s.median, s.max), (0.25, 0.5, 1.0));
        assert_eq!(s.q1, 1.0 / 3.0);
        assert_eq!(s.q3, 1.0);
        assert!(BoxSummary::of(&[]).is_none());
        let s = BoxSummary::of(&[0.0, 1.0]).unwrap();
        assert_eq!(s.median, 0.5);
    }

    #[test]
    fn default_edges() {
        assert_eq!(default_bucket_edges(2), vec![2, 4]);
        assert_eq!(default_bucket_edges(16), vec![2, 4, 8, 16, 32]);
    }

    #[test]
    fn all_in_first_bucket() {
        let ds = MatchDataset::new("t", (0..6).map(|i| q(&format!("q{i}"), 2, 0)).collect());
        let rows = mrr_by_candidate_bucket(&OracleScorer, &ds, &[2, 4, 8, 16]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].queries, 6);
        assert!(rows[1..].iter().all(|r| r.queries == 0 && r.mrr.is_none()));
        assert_eq!(rows[0].mrr, Some(1.0));
        assert_eq!(rows[3].label(), "[16,inf)");
    }

    #[test]
    fn bucket_counts_partition() {
        let ds = MatchDataset::new("t", (0..40).map(|i| q(&format!("q{i}"), 2 + i % 23, 1)).collect());
        let rows = mrr_by_candidate_bucket(&RandomScorer { seed: 1 }, &ds, &[3, 5, 9]).unwrap();
        assert_eq!(rows[0].label(), "[0,3)");
        assert_eq!(rows.iter().map(|r| r.queries).sum::<usize>(), 40);
        assert!(mrr_by_candidate_bucket(&OracleScorer, &ds, &[4, 4]).is_err());
        assert!(mrr_by_candidate_bucket(&OracleScorer, &ds, &[]).is_err());
    }

    #[test]
    fn type_table_cases() {
        let ds = MatchDataset::new("t", vec![q("a", 2, 0), q("b", 3, 1), q("c", 4, 0)]);
        let table = mrr_by_type(&OracleScorer, &ds, &TypeMap::new()).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].label, UNKNOWN_TYPE);
        assert_eq!(table.rows[0].mean_candidates, 3.0);

        let mut types = TypeMap::new();
        for id in ["a", "b", "c"] {
            types.insert(id, "Person");
        }
        let flat = |m: &MatchQuery| vec![0.0; m.candidates.len()];
        let overall = crate::eval::mean_reciprocal_rank(&flat, &ds).unwrap();
        let table = mrr_by_type(&flat, &ds, &types).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].mrr, overall);
        assert!(table.disjoint);

        types.insert("a", "Artist");
        let table = mrr_by_type(&flat, &ds, &types).unwrap();
        assert!(!table.disjoint);
        assert_eq!(table.rows.iter().map(|r| r.queries).sum::<usize>(), 4);
    }

    #[test]
    fn rank2_cases() {
        // Flat scores keep input order, so positive index 1 lands at rank 2
        // behind candidate 0.
        let ds = MatchDataset::new("t", vec![q("a", 3, 1), q("b", 3, 1), q("c", 3, 0)]);
        let flat = |m: &MatchQuery| vec![0.0; m.candidates.len()];
        let mut types = TypeMap::new();
        assert_eq!(rank2_same_type_fraction(&OracleScorer, &ds, &types).unwrap(), Rank2Summary { fraction: None, cases: 0 });
        types.insert("a/c0", "Song");
        types.insert("a/c1", "Song");
        types.insert("b/c0", "Album");
        types.insert("b/c1", "Song");
        assert_eq!(rank2_same_type_fraction(&flat, &ds, &types).unwrap(), Rank2Summary { fraction: Some(0.5), cases: 2 });
        types.insert("b/c0", "Song");
        assert_eq!(rank2_same_type_fraction(&flat, &ds, &types).unwrap().fraction, Some(1.0));
    }
}
