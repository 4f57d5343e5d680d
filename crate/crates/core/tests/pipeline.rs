use std::collections::BTreeMap;

use kgmatch::dataset::{build_matching_dataset, subsample_training, GraphPair, MatchDataset, MatchQuery};
use kgmatch::eval::{
    harmonic_over_n, mean_reciprocal_rank, mrr_by_type, training_size_sweep, RandomScorer, SweepConfig,
};
use kgmatch::matcher::{expand_pairs, train, ModelScorer, ModelSpec, TrainConfig};
use kgmatch::name_index::{NameIndex, NormalizationPolicy};
use kgmatch::pipeline::{prepare_twin, ExperimentConfig};
use kgmatch::rdf::{build_graph, extract_alignment, extract_names, DisambiguationFilter, PredicateFilter, FOAF_NAME, OWL_SAME_AS, RDFS_LABEL};
use kgmatch::seed;
use kgmatch::synth::{generate, SyntheticSpec};
use kgmatch::typemap::TypeMap;

fn synth_dataset(spec: &SyntheticSpec) -> MatchDataset {
    let twin = generate(spec).unwrap();
    let src = build_graph(&twin.source, &PredicateFilter::default());
    let tgt = build_graph(&twin.target, &PredicateFilter::default());
    let names = extract_names(&src, &[FOAF_NAME]);
    let index = NameIndex::build(&extract_names(&tgt, &[RDFS_LABEL]), NormalizationPolicy::Exact);
    let alignment = extract_alignment(&twin.alignment, &[OWL_SAME_AS], &src, &tgt, &DisambiguationFilter::none());
    assert_eq!(alignment.len(), spec.entities, "every synthetic entity is aligned");
    let pair = GraphPair { source: &src, source_names: &names, target: &tgt, target_index: &index };
    build_matching_dataset("forward", pair, &alignment)
}

#[test]
fn zipf_groups_give_a_decreasing_histogram() {
    let spec = SyntheticSpec { entities: 5000, zipf_exponent: 1.0, seed: 11, ..Default::default() };
    let ds = synth_dataset(&spec);
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for q in &ds.queries {
        q.validate().unwrap();
        *histogram.entry(q.candidates.len()).or_default() += 1;
    }
    assert!(histogram.keys().all(|&n| n >= 2 && n <= spec.max_group));
    let counts: Vec<usize> = histogram.values().copied().collect();
    assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{histogram:?}");
    assert!(counts[0] > *counts.last().unwrap());
}

#[test]
fn random_scoring_favours_small_candidate_sets() {
    let mut types = TypeMap::new();
    let queries: Vec<MatchQuery> = (0..400)
        .map(|i| {
            let (label, n) = if i % 2 == 0 { ("A", 12) } else { ("B", 3) };
            let query = format!("http://s/{i}");
            types.insert(&query, label);
            MatchQuery {
                query,
                name: format!("n{i}"),
                candidates: (0..n).map(|j| format!("http://t/{i}/{j}")).collect(),
                positive: i % n,
            }
        })
        .collect();
    let ds = MatchDataset::new("forward", queries);
    let table = mrr_by_type(&RandomScorer { seed: 3 }, &ds, &types).unwrap();
    let mrr = |label: &str| table.rows.iter().find(|r| r.label == label).unwrap().mrr;
    assert!(table.disjoint);
    assert!(mrr("A") < mrr("B"), "A {} vs B {}", mrr("A"), mrr("B"));
    assert!((mrr("A") - harmonic_over_n(12)).abs() < 0.06);
    assert!((mrr("B") - harmonic_over_n(3)).abs() < 0.08);
}

#[test]
fn full_sweep_cell_equals_plain_training() {
    let spec = SyntheticSpec { entities: 800, seed: 4, ..Default::default() };
    let mut cfg = ExperimentConfig { hidden: 16, seed: 4, ..Default::default() };
    cfg.matcher = TrainConfig { batch_size: 64, max_epochs: 5, ..TrainConfig::default() };
    let prep = prepare_twin(&spec, &cfg).unwrap();
    let sweep = SweepConfig {
        percents: vec![100.0],
        repeats: Some(vec![1]),
        model: ModelSpec::mlp(16),
        train: cfg.matcher,
        seed: 4,
    };
    let curve = training_size_sweep(&prep.split, &prep.source_table, &prep.target_table, &sweep).unwrap();

    let cell = seed::derive_indexed(seed::derive(4, "sweep"), 0);
    let sub = subsample_training(&prep.split, 1.0, cell).unwrap();
    assert_eq!(sub.train.len() + sub.valid.len(), prep.split.train.len() + prep.split.valid.len());
    let train_cfg = TrainConfig { seed: seed::derive(cell, "matcher"), ..cfg.matcher };
    let (src, tgt) = (&prep.source_table, &prep.target_table);
    let out = train(ModelSpec::mlp(16), &expand_pairs(&sub.train), src, tgt, &train_cfg, &sub.valid).unwrap();
    let mrr = mean_reciprocal_rank(&ModelScorer { model: &out.model, source: src, target: tgt }, &sub.valid).unwrap();

    let point = &curve.points[0];
    assert_eq!(point.values, vec![mrr]);
    assert_eq!((point.train_queries, point.valid_queries), (sub.train.len(), sub.valid.len()));
}
