use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::MatchDataset;
use crate::typemap::TypeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeStat {
    pub queries: usize,
    pub mean_candidates: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub queries: usize,
    pub unique_names: usize,
    pub unique_candidates: usize,
    /// Candidate-set size → number of queries.
    pub candidate_histogram: BTreeMap<usize, usize>,
    pub mean_candidates: f64,
    /// Keyed by the query entity's type labels; untyped queries under `unknown`.
    pub per_type: BTreeMap<String, TypeStat>,
}

pub fn dataset_stats(ds: &MatchDataset, types: Option<&TypeMap>) -> DatasetStats {
    let mut names = HashSet::new();
    let mut candidates = HashSet::new();
    let mut histogram = BTreeMap::new();
    let mut per_type: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut total = 0usize;
    for q in &ds.queries {
        names.insert(q.name.as_str());
        candidates.extend(q.candidates.iter().map(String::as_str));
        *histogram.entry(q.candidates.len()).or_insert(0) += 1;
        total += q.candidates.len();
        if let Some(types) = types {
            let labels: Vec<&str> = match types.labels(&q.query) {
                Some(l) if !l.is_empty() => l.iter().map(String::as_str).collect(),
                _ => vec!["unknown"],
            };
            for l in labels {
                let e = per_type.entry(l.to_string()).or_default();
                e.0 += 1;
                e.1 += q.candidates.len();
            }
        }
    }
    DatasetStats {
        queries: ds.len(),
        unique_names: names.len(),
        unique_candidates: candidates.len(),
        candidate_histogram: histogram,
        mean_candidates: if ds.is_empty() { 0.0 } else { total as f64 / ds.len() as f64 },
        per_type: per_type
            .into_iter()
            .map(|(k, (n, c))| (k, TypeStat { queries: n, mean_candidates: c as f64 / n as f64 }))
            .collect(),
    }
}
