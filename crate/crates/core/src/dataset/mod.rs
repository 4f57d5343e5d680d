//! Directional ambiguous-entity matching datasets.
//!
//! A query is an aligned source entity whose name retrieves at least two
//! target entities, exactly one of which is its aligned counterpart.

mod io;
mod split;
mod stats;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::name_index::{NameIndex, NormalizationPolicy};
use crate::rdf::{AlignmentSet, EntityId, Kg, NameMap};

pub use io::{read_dataset_tsv, read_split, write_dataset_tsv, write_split, SplitFiles, SplitMeta};
pub use split::{split_dataset, split_sizes, subsample_training, subsample_sizes, DatasetSplit, DEFAULT_RATIOS};
pub use stats::{dataset_stats, DatasetStats, TypeStat};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchQuery {
    /// Source-graph IRI of the query entity.
    pub query: String,
    /// The (raw) name that produced the candidate set.
    pub name: String,
    /// Target-graph IRIs sharing the name, in index posting order.
    pub candidates: Vec<String>,
    /// Index of the aligned target within `candidates`.
    pub positive: usize,
}

impl MatchQuery {
    pub fn positive_iri(&self) -> &str {
        &self.candidates[self.positive]
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    /// Structural invariants: at least two distinct candidates and a valid
    /// positive index (so exactly one positive, at least one negative).
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Data(format!("query {}: {m}", self.query)));
        if self.candidates.len() < 2 {
            return fail("fewer than two candidates");
        }
        if self.positive >= self.candidates.len() {
            return fail("positive index out of range");
        }
        let mut sorted: Vec<&str> = self.candidates.iter().map(String::as_str).collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return fail("duplicate candidate");
        }
        Ok(())
    }
}

/// Why aligned source entities produced no query.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipStats {
    pub aligned: usize,
    pub no_name: usize,
    /// Some name retrieved the aligned target, but it was the only match.
    pub single_candidate: usize,
    /// No name of the source entity retrieves the aligned target.
    pub positive_not_found: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub source: String,
    pub target: String,
    pub policy: NormalizationPolicy,
    pub skips: SkipStats,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchDataset {
    /// e.g. `DB->WD`.
    pub direction: String,
    pub queries: Vec<MatchQuery>,
    pub meta: DatasetMeta,
}

impl MatchDataset {
    pub fn new(direction: impl Into<String>, queries: Vec<MatchQuery>) -> Self {
        MatchDataset { direction: direction.into(), queries, meta: DatasetMeta::default() }
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Checks every query and that query IRIs are unique.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::with_capacity(self.queries.len());
        for q in &self.queries {
            q.validate()?;
            if !seen.insert(q.query.as_str()) {
                return Err(Error::Data(format!("query {} appears twice", q.query)));
            }
        }
        Ok(())
    }

    /// Same direction and metadata, different queries.
    pub fn with_queries(&self, queries: Vec<MatchQuery>) -> Self {
        MatchDataset { direction: self.direction.clone(), queries, meta: self.meta.clone() }
    }
}

/// Inputs that identify the two graphs in dataset metadata.
#[derive(Debug, Clone, Copy)]
pub struct GraphPair<'a> {
    pub source: &'a Kg,
    pub source_names: &'a NameMap,
    pub target: &'a Kg,
    pub target_index: &'a NameIndex,
}

enum Outcome {
    Query(MatchQuery),
    NoName,
    Single,
    NotFound,
}

fn query_for(graphs: &GraphPair<'_>, s: EntityId, t: EntityId) -> Outcome {
    let Some(names) = graphs.source_names.get(&s) else {
        return Outcome::NoName;
    };
    let mut saw_single = false;
    for name in names {
        let postings = graphs.target_index.lookup(name);
        let Some(positive) = postings.iter().position(|&c| c == t) else {
            continue;
        };
        if postings.len() < 2 {
            saw_single = true;
            continue;
        }
        return Outcome::Query(MatchQuery {
            query: graphs.source.entity_iri(s).to_string(),
            name: name.clone(),
            candidates: postings.iter().map(|&c| graphs.target.entity_iri(c).to_string()).collect(),
            positive,
        });
    }
    if saw_single {
        Outcome::Single
    } else {
        Outcome::NotFound
    }
}

/// Builds the dataset for one direction.
///
/// Each aligned pair `s -> t` is tried with the names of `s` in order; the
/// first name whose target lookup contains `t` among at least two candidates
/// yields the query. Queries are emitted in ascending source-id order.
pub fn build_matching_dataset(
    direction: &str,
    graphs: GraphPair<'_>,
    alignment: &AlignmentSet,
) -> MatchDataset {
    let mut pairs = alignment.pairs().to_vec();
    pairs.sort_unstable();
    let outcomes: Vec<Outcome> = pairs.par_iter().map(|&(s, t)| query_for(&graphs, s, t)).collect();

    let mut skips = SkipStats { aligned: pairs.len(), ..Default::default() };
    let mut queries = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Query(q) => queries.push(q),
            Outcome::NoName => skips.no_name += 1,
            Outcome::Single => skips.single_candidate += 1,
            Outcome::NotFound => skips.positive_not_found += 1,
        }
    }
    MatchDataset {
        direction: direction.to_string(),
        queries,
        meta: DatasetMeta {
            source: String::new(),
            target: String::new(),
            policy: graphs.target_index.policy(),
            skips,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{build_graph, extract_alignment, extract_names, DisambiguationFilter, Literal, PredicateFilter, Triple, FOAF_NAME, OWL_SAME_AS, RDFS_LABEL};

    struct Fixture {
        src: Kg,
        tgt: Kg,
        src_names: NameMap,
        index: NameIndex,
    }

    fn fixture() -> Fixture {
        let mut s = Vec::new();
        s.push(Triple::literal("http://db/John_Burt_(footballer)", FOAF_NAME, Literal::plain("John Burt")));
        s.push(Triple::literal("http://db/Unique", FOAF_NAME, Literal::plain("Only One")));
        s.push(Triple::literal("http://db/Renamed", FOAF_NAME, Literal::plain("Old Name")));
        let mut t = Vec::new();
        for q in ["Q1", "Q2", "Q3", "Q4"] {
            t.push(Triple::literal(format!("http://wd/{q}"), RDFS_LABEL, Literal::tagged("John Burt", "en")));
        }
        t.push(Triple::literal("http://wd/Q9", RDFS_LABEL, Literal::plain("Only One")));
        t.push(Triple::literal("http://wd/Q10", RDFS_LABEL, Literal::plain("New Name")));
        t.push(Triple::literal("http://wd/Q11", RDFS_LABEL, Literal::plain("Old Name")));
        t.push(Triple::literal("http://wd/Q12", RDFS_LABEL, Literal::plain("Old Name")));
        let src = build_graph(&s, &PredicateFilter::default());
        let tgt = build_graph(&t, &PredicateFilter::default());
        let src_names = extract_names(&src, &[FOAF_NAME]);
        let index = NameIndex::build(&extract_names(&tgt, &[RDFS_LABEL]), NormalizationPolicy::Exact);
        Fixture { src, tgt, src_names, index }
    }

    fn build(f: &Fixture, same_as: &[(&str, &str)]) -> MatchDataset {
        let triples: Vec<Triple> = same_as.iter().map(|(a, b)| Triple::resource(*a, OWL_SAME_AS, *b)).collect();
        let al = extract_alignment(&triples, &[OWL_SAME_AS], &f.src, &f.tgt, &DisambiguationFilter::none());
        let graphs = GraphPair { source: &f.src, source_names: &f.src_names, target: &f.tgt, target_index: &f.index };
        build_matching_dataset("DB->WD", graphs, &al)
    }

    #[test]
    fn john_burt_query() {
        let f = fixture();
        let ds = build(&f, &[("http://db/John_Burt_(footballer)", "http://wd/Q3")]);
        assert_eq!(ds.len(), 1);
        let q = &ds.queries[0];
        assert_eq!(q.candidates.len(), 4);
        assert_eq!(q.positive_iri(), "http://wd/Q3");
        assert_eq!(q.positive, 2);
        ds.validate().unwrap();
    }

    #[test]
    fn unambiguous_pairs_are_skipped() {
        let f = fixture();
        let ds = build(&f, &[("http://db/Unique", "http://wd/Q9")]);
        assert!(ds.is_empty());
        assert_eq!(ds.meta.skips.single_candidate, 1);
    }

    #[test]
    fn name_mismatch_is_skipped() {
        let f = fixture();
        let ds = build(&f, &[("http://db/Renamed", "http://wd/Q10")]);
        assert!(ds.is_empty());
        assert_eq!(ds.meta.skips.positive_not_found, 1);
    }

    #[test]
    fn validation_catches_bad_queries() {
        let q = MatchQuery { query: "q".into(), name: "n".into(), candidates: vec!["a".into()], positive: 0 };
        assert!(q.validate().is_err());
        let q = MatchQuery { query: "q".into(), name: "n".into(), candidates: vec!["a".into(), "a".into()], positive: 0 };
        assert!(q.validate().is_err());
        let q = MatchQuery { query: "q".into(), name: "n".into(), candidates: vec!["a".into(), "b".into()], positive: 2 };
        assert!(q.validate().is_err());
    }
}
