use serde::{Deserialize, Serialize};

use crate::dataset::{build_matching_dataset, split_dataset, DatasetSplit, GraphPair, MatchDataset, DEFAULT_RATIOS};
use crate::embeddings::{generate_walks, train_skipgram, EmbeddingTable, SkipgramConfig, WalkConfig};
use crate::error::Result;
use crate::eval::{default_bucket_edges, evaluate, EvalOptions, EvalReport, ReportMeta};
use crate::matcher::{expand_pairs, train, MatcherModel, ModelScorer, ModelSpec, TrainConfig, TrainOutcome};
use crate::name_index::{NameIndex, NormalizationPolicy};
use crate::rdf::{
    build_graph, extract_alignment, extract_names, DisambiguationFilter, Kg, PredicateFilter, Triple, FOAF_NAME,
    OWL_SAME_AS, RDFS_LABEL, RDF_TYPE,
};
use crate::seed;
use crate::synth::{self, SyntheticSpec};
use crate::typemap::TypeMap;

/// Settings for an in-memory run over synthetic twin graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub walks: WalkConfig,
    pub skipgram: SkipgramConfig,
    pub matcher: TrainConfig,
    pub hidden: usize,
    pub ratios: [f64; 3],
    pub policy: NormalizationPolicy,
    /// Global seed; every stage derives its own from it.
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            walks: WalkConfig::default(),
            skipgram: SkipgramConfig::default(),
            matcher: TrainConfig::default(),
            hidden: 64,
            ratios: DEFAULT_RATIOS,
            policy: NormalizationPolicy::Exact,
            seed: 0,
        }
    }
}

/// Graphs, dataset and embeddings shared by the models of one experiment.
#[derive(Debug, Clone)]
pub struct PreparedTwin {
    pub source: Kg,
    pub target: Kg,
    pub dataset: MatchDataset,
    pub split: DatasetSplit,
    pub source_table: EmbeddingTable,
    pub target_table: EmbeddingTable,
    pub types: TypeMap,
}

pub(crate) fn embed(kg: &Kg, walks: WalkConfig, skipgram: SkipgramConfig, seed: u64, role: &str) -> Result<EmbeddingTable> {
    let walks = WalkConfig { seed: seed::derive(seed, &format!("walks/{role}")), ..walks };
    let sg = SkipgramConfig { seed: seed::derive(seed, &format!("skipgram/{role}")), ..skipgram };
    let corpus = generate_walks(kg, &walks)?;
    Ok(train_skipgram(&corpus, &sg)?.table)
}

/// Generates the twin graphs and runs everything up to the embeddings.
pub fn prepare_twin(spec: &SyntheticSpec, cfg: &ExperimentConfig) -> Result<PreparedTwin> {
    let twin = synth::generate(spec)?;
    let graph = |ts: &[Triple]| build_graph(ts, &PredicateFilter::default());
    let source = graph(&twin.source);
    let target = graph(&twin.target);
    let source_names = extract_names(&source, &[FOAF_NAME, RDFS_LABEL]);
    let index = NameIndex::build(&extract_names(&target, &[FOAF_NAME, RDFS_LABEL]), cfg.policy);
    let alignment = extract_alignment(&twin.alignment, &[OWL_SAME_AS], &source, &target, &DisambiguationFilter::none());
    let pair = GraphPair { source: &source, source_names: &source_names, target: &target, target_index: &index };
    let dataset = build_matching_dataset("source->target", pair, &alignment);
    let split = split_dataset(&dataset, cfg.ratios, seed::derive(cfg.seed, "split"))?;
    let source_table = embed(&source, cfg.walks, cfg.skipgram, cfg.seed, "source")?;
    let target_table = embed(&target, cfg.walks, cfg.skipgram, cfg.seed, "target")?;
    let mut types = TypeMap::from_kg(&source, RDF_TYPE);
    types.merge(TypeMap::from_kg(&target, RDF_TYPE));
    Ok(PreparedTwin { source, target, dataset, split, source_table, target_table, types })
}

impl PreparedTwin {
    pub fn train(&self, spec: ModelSpec, cfg: &TrainConfig) -> Result<TrainOutcome> {
        train(spec, &expand_pairs(&self.split.train), &self.source_table, &self.target_table, cfg, &self.split.valid)
    }

    /// Test-set report with per-type and per-bucket breakdowns.
    pub fn evaluate_test(&self, model: &MatcherModel, seed: u64) -> Result<EvalReport> {
        let scorer = ModelScorer { model, source: &self.source_table, target: &self.target_table };
        let max = self.dataset.queries.iter().map(|q| q.candidate_count()).max().unwrap_or(2);
        let opts = EvalOptions { types: Some(&self.types), bucket_edges: Some(default_bucket_edges(max)) };
        let meta = ReportMeta {
            model: model.kind().name().to_string(),
            dataset: self.dataset.direction.clone(),
            split: "test".into(),
            seed: Some(seed),
        };
        evaluate(&scorer, &self.split.test, &opts, meta)
    }
}

#[derive(Debug, Clone)]
pub struct TwinResult {
    pub mlp: EvalReport,
    pub logreg: EvalReport,
    pub mlp_training: TrainOutcome,
    pub logreg_training: TrainOutcome,
}

/// MLP and logistic regression trained and tested on the same twin data.
pub fn run_twin_experiment(spec: &SyntheticSpec, cfg: &ExperimentConfig) -> Result<(PreparedTwin, TwinResult)> {
    let prepared = prepare_twin(spec, cfg)?;
    let mlp_cfg = TrainConfig { seed: seed::derive(cfg.seed, "matcher/mlp"), ..cfg.matcher };
    let lr_cfg = TrainConfig { seed: seed::derive(cfg.seed, "matcher/logreg"), ..cfg.matcher };
    let mlp_training = prepared.train(ModelSpec::mlp(cfg.hidden), &mlp_cfg)?;
    let logreg_training = prepared.train(ModelSpec::logreg(), &lr_cfg)?;
    let mlp = prepared.evaluate_test(&mlp_training.model, cfg.seed)?;
    let logreg = prepared.evaluate_test(&logreg_training.model, cfg.seed)?;
    Ok((prepared, TwinResult { mlp, logreg, mlp_training, logreg_training }))
}
