use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::breakdown::{bucket_rows, rank2_summary, type_table, BucketRow, Rank2Summary, TypeTable};
use super::{mean_rr, rank_queries, BaselineMode, Scorer};
use crate::dataset::MatchDataset;
use crate::error::{Error, Result};
use crate::typemap::TypeMap;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub model: String,
    pub dataset: String,
    pub split: String,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default)]
pub struct EvalOptions<'a> {
    /// Enables the per-type table and the rank-2 analysis.
    pub types: Option<&'a TypeMap>,
    /// Enables the per-candidate-count table.
    pub bucket_edges: Option<Vec<usize>>,
}

/// JSON layout:
///
/// ```text
/// { "mrr": f64, "queries": usize, "random_baseline": f64,
///   "rank_histogram": { "<rank>": count, ... },
///   "by_type": null | { "rows": [{label, mrr, queries, mean_candidates}], "disjoint": bool },
///   "by_bucket": null | [{lo, hi|null, queries, mrr|null, summary|null}],
///   "rank2_same_type": null | { "fraction": f64|null, "cases": usize },
///   "meta": { model, dataset, split, seed|null } }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mrr: f64,
    pub queries: usize,
    /// Analytic MRR of uniformly random ranking on the same queries.
    pub random_baseline: f64,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub by_type: Option<TypeTable>,
    pub by_bucket: Option<Vec<BucketRow>>,
    pub rank2_same_type: Option<Rank2Summary>,
    pub meta: ReportMeta,
}

pub fn evaluate(scorer: &dyn Scorer, ds: &MatchDataset, opts: &EvalOptions, meta: ReportMeta) -> Result<EvalReport> {
    if ds.is_empty() {
        return Err(Error::Data("cannot evaluate an empty dataset".into()));
    }
    let outcomes = rank_queries(scorer, ds)?;
    let mut rank_histogram = BTreeMap::new();
    for o in &outcomes {
        *rank_histogram.entry(o.rank).or_insert(0) += 1;
    }
    Ok(EvalReport {
        mrr: mean_rr(&outcomes).expect("non-empty"),
        queries: outcomes.len(),
        random_baseline: super::random_baseline_mrr(ds, BaselineMode::Analytic)?,
        rank_histogram,
        by_type: opts.types.map(|t| type_table(ds, &outcomes, t)),
        by_bucket: opts.bucket_edges.as_deref().map(|e| bucket_rows(&outcomes, e)).transpose()?,
        rank2_same_type: opts.types.map(|t| rank2_summary(ds, &outcomes, t)),
        meta,
    })
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::format("report", e.to_string()))
    }

    /// `bucket,queries,mrr,min,q1,median,q3,max`
    pub fn write_bucket_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "bucket,queries,mrr,min,q1,median,q3,max")?;
        for r in self.by_bucket.iter().flatten() {
            write!(w, "{},{},", r.label(), r.queries)?;
            match (r.mrr, r.summary) {
                (Some(m), Some(s)) => writeln!(w, "{m},{},{},{},{},{}", s.min, s.q1, s.median, s.q3, s.max)?,
                _ => writeln!(w, ",,,,,")?,
            }
        }
        Ok(())
    }

    /// `type,queries,mrr,mean_candidates`
    pub fn write_type_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "type,queries,mrr,mean_candidates")?;
        for r in self.by_type.iter().flat_map(|t| &t.rows) {
            writeln!(w, "{},{},{},{}", r.label, r.queries, r.mrr, r.mean_candidates)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::MatchQuery;
    use crate::eval::OracleScorer;

    fn ds() -> MatchDataset {
        MatchDataset::new(
            "t",
            (0..5)
                .map(|i| MatchQuery {
                    query: format!("q{i}"),
                    name: "n".into(),
                    candidates: (0..2 + i).map(|j| format!("q{i}c{j}")).collect(),
                    positive: i,
                })
                .collect(),
        )
    }

    #[test]
    fn report_fields_and_round_trip() {
        let types = TypeMap::new();
        let opts = EvalOptions { types: Some(&types), bucket_edges: Some(vec![2, 4, 8]) };
        let flat = |q: &MatchQuery| vec![1.0; q.candidates.len()];
        let r = evaluate(&flat, &ds(), &opts, ReportMeta { model: "flat".into(), ..Default::default() }).unwrap();
        // positive i sits at rank i+1 under input-order ties
        let expected = (1.0 + 1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 4.0 + 1.0 / 5.0) / 5.0;
        assert_eq!(r.mrr, expected);
        assert_eq!(r.rank_histogram.values().sum::<usize>(), 5);
        assert_eq!(r.by_bucket.as_ref().unwrap().iter().map(|b| b.queries).sum::<usize>(), 5);
        assert_eq!(EvalReport::from_json(&r.to_json()).unwrap(), r);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in ["mrr", "queries", "random_baseline", "rank_histogram", "by_type", "by_bucket", "rank2_same_type", "meta"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let mut csv = Vec::new();
        r.write_bucket_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
    }

    #[test]
    fn oracle_and_empty() {
        let r = evaluate(&OracleScorer, &ds(), &EvalOptions::default(), ReportMeta::default()).unwrap();
        assert_eq!(r.mrr, 1.0);
        assert!(r.by_type.is_none() && r.by_bucket.is_none());
        assert!(evaluate(&OracleScorer, &MatchDataset::default(), &EvalOptions::default(), ReportMeta::default()).is_err());
    }
}
