//! Build an ambiguous-entity dataset from synthetic twin graphs, split it
//! 70/10/20, and print statistics and the split arithmetic for two large totals.
//!
//! cargo run --example build_dataset

use std::collections::BTreeMap;

use kgmatch::dataset::{build_matching_dataset, dataset_stats, split_dataset, split_sizes, GraphPair, DEFAULT_RATIOS};
use kgmatch::name_index::{NameIndex, NormalizationPolicy};
use kgmatch::rdf::{build_graph, extract_alignment, extract_names, DisambiguationFilter, PredicateFilter, FOAF_NAME, OWL_SAME_AS, RDFS_LABEL};
use kgmatch::synth::{generate, SyntheticSpec};

fn main() -> kgmatch::Result<()> {
    let twin = generate(&SyntheticSpec { entities: 2000, seed: 11, ..Default::default() })?;
    let source = build_graph(&twin.source, &PredicateFilter::default());
    let target = build_graph(&twin.target, &PredicateFilter::default());
    let names = extract_names(&source, &[FOAF_NAME]);
    let index = NameIndex::build(&extract_names(&target, &[RDFS_LABEL]), NormalizationPolicy::Exact);
    let alignment = extract_alignment(&twin.alignment, &[OWL_SAME_AS], &source, &target, &DisambiguationFilter::none());

    let graphs = GraphPair { source: &source, source_names: &names, target: &target, target_index: &index };
    let ds = build_matching_dataset("source->target", graphs, &alignment);
    ds.validate()?;
    let stats = dataset_stats(&ds, None);
    println!("{} queries, mean {:.2} candidates; skipped {:?}", stats.queries, stats.mean_candidates, ds.meta.skips);
    let hist: BTreeMap<_, _> = stats.candidate_histogram.iter().collect();
    println!("candidates -> queries: {hist:?}");

    let q = &ds.queries[0];
    println!("example query {} named {:?}: {} candidates, positive {}", q.query, q.name, q.candidate_count(), q.positive_iri());

    let split = split_dataset(&ds, DEFAULT_RATIOS, 7)?;
    println!("split: train {}, valid {}, test {}", split.train.len(), split.valid.len(), split.test.len());
    for total in [376_065, 329_320] {
        println!("split_sizes({total}) = {:?}", split_sizes(total, DEFAULT_RATIOS)?);
    }
    Ok(())
}
