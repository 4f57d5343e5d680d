use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use super::config::{Direction, GraphRole, PipelineConfig};
use super::experiment::embed;
use crate::dataset::{build_matching_dataset, read_split, split_dataset, write_split, DatasetSplit, GraphPair};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::eval::{
    default_bucket_edges, evaluate, training_size_sweep, EvalOptions, EvalReport, OracleScorer, RandomScorer,
    ReportMeta, Scorer, SweepConfig, SweepCurve,
};
use crate::matcher::{expand_pairs, train, Checkpoint, CheckpointMeta, ModelScorer, TrainConfig, TrainOutcome};
use crate::name_index::NameIndex;
use crate::rdf::{
    extract_alignment, extract_names_with_languages, open_ntriples, read_kg_file, write_kg_file, write_ntriples,
    AlignmentSet, GraphBuilder, Kg, NTriplesReader, PredicateFilter, Triple,
};
use crate::seed;
use crate::synth::{self, SyntheticSpec};
use crate::typemap::TypeMap;

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| Error::io(dir, e)),
        _ => Ok(()),
    }
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    create_parent(path)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

fn strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn input_files(cfg: &PipelineConfig, role: GraphRole) -> Result<&[PathBuf]> {
    let files = match role {
        GraphRole::Source => &cfg.paths.source,
        GraphRole::Target => &cfg.paths.target,
    };
    if files.is_empty() {
        return Err(Error::Config(format!("no {} input files configured", role.name())));
    }
    Ok(files)
}

/// Counts reported by `ingest` for one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub role: GraphRole,
    pub lines: u64,
    pub malformed: u64,
    pub triples: usize,
    pub entities: usize,
    pub named_entities: usize,
    pub names: usize,
}

fn graph_filter(cfg: &PipelineConfig) -> PredicateFilter {
    let mut drop: std::collections::HashSet<String> = cfg.graph.drop_predicates.iter().cloned().collect();
    drop.extend(cfg.alignment.predicates.iter().cloned());
    PredicateFilter { keep: cfg.graph.keep_predicates.as_ref().map(|k| k.iter().cloned().collect()), drop }
}

fn name_predicates(cfg: &PipelineConfig, role: GraphRole) -> &[String] {
    match role {
        GraphRole::Source => &cfg.names.source_predicates,
        GraphRole::Target => &cfg.names.target_predicates,
    }
}

fn names_of(cfg: &PipelineConfig, kg: &Kg, role: GraphRole) -> crate::rdf::NameMap {
    extract_names_with_languages(kg, &strs(name_predicates(cfg, role)), &strs(&cfg.names.languages))
}

/// Parses the graph's files, then writes the graph snapshot, the name index
/// (binary and TSV) and the type file.
pub fn cmd_ingest(cfg: &PipelineConfig, role: GraphRole) -> Result<IngestSummary> {
    let layout = cfg.layout();
    let files = input_files(cfg, role)?;
    let mut builder = GraphBuilder::new(graph_filter(cfg));
    let (mut lines, mut malformed) = (0, 0);
    for path in files {
        let mut reader = NTriplesReader::new(open_ntriples(path)?);
        for t in reader.by_ref() {
            builder.add(&t.map_err(|e| match e {
                Error::Stream(io) => Error::io(path, io),
                other => other,
            })?);
        }
        lines += reader.lines_read();
        malformed += reader.malformed_count();
    }
    let kg = builder.build();
    let names = names_of(cfg, &kg, role);
    let index = NameIndex::build(&names, cfg.names.policy);

    create_parent(&layout.graph(role))?;
    write_kg_file(&layout.graph(role), &kg)?;
    index.save(&layout.name_index(role))?;
    write_with(&layout.name_index_tsv(role), |w| index.write_tsv(w))?;
    let types = TypeMap::from_kg(&kg, &cfg.graph.type_predicate);
    write_with(&role_types(cfg, role), |w| types.write_tsv(w))?;

    let summary = IngestSummary {
        role,
        lines,
        malformed,
        triples: kg.triple_count(),
        entities: kg.entity_count(),
        named_entities: names.len(),
        names: index.posting_count(),
    };
    info!("ingested {}: {summary:?}", role.name());
    Ok(summary)
}

fn role_types(cfg: &PipelineConfig, role: GraphRole) -> PathBuf {
    cfg.layout().root.join(format!("{}.types.tsv", role.name()))
}

fn load_types(cfg: &PipelineConfig) -> Result<Option<TypeMap>> {
    let read = |path: &Path| -> Result<TypeMap> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        TypeMap::read_tsv(BufReader::new(f))
    };
    if let Some(path) = &cfg.paths.types {
        return read(path).map(Some);
    }
    let mut merged: Option<TypeMap> = None;
    for role in [GraphRole::Source, GraphRole::Target] {
        let path = role_types(cfg, role);
        if path.exists() {
            merged.get_or_insert_with(TypeMap::new).merge(read(&path)?);
        }
    }
    Ok(merged)
}

fn read_alignment_triples(cfg: &PipelineConfig) -> Result<Vec<Triple>> {
    let preds = strs(&cfg.alignment.predicates);
    let mut out = Vec::new();
    for path in &cfg.paths.alignment {
        for t in NTriplesReader::new(open_ntriples(path)?) {
            let t = t.map_err(|e| match e {
                Error::Stream(io) => Error::io(path, io),
                other => other,
            })?;
            if preds.contains(&t.predicate.as_str()) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Builds the dataset for one direction and writes its split.
pub fn cmd_build_dataset(cfg: &PipelineConfig, direction: Direction) -> Result<DatasetSplit> {
    let layout = cfg.layout();
    let source = read_kg_file(&layout.graph(GraphRole::Source))?;
    let target = read_kg_file(&layout.graph(GraphRole::Target))?;
    let triples = read_alignment_triples(cfg)?;
    let forward = extract_alignment(&triples, &strs(&cfg.alignment.predicates), &source, &target, &cfg.alignment.disambiguation);
    info!("alignment: {} pairs ({:?})", forward.len(), forward.stats);

    let (query_role, cand_role) = direction.roles();
    let (query_kg, cand_kg, alignment) = match direction {
        Direction::Forward => (&source, &target, forward),
        Direction::Reverse => {
            let mut rev = AlignmentSet::default();
            for &(s, t) in forward.pairs() {
                rev.insert(t, s);
            }
            (&target, &source, rev)
        }
    };
    if alignment.is_empty() {
        warn!("alignment is empty; the dataset will be empty");
    }
    let query_names = names_of(cfg, query_kg, query_role);
    let index = NameIndex::load(&layout.name_index(cand_role))?;
    let pair = GraphPair { source: query_kg, source_names: &query_names, target: cand_kg, target_index: &index };
    let mut ds = build_matching_dataset(direction.label(), pair, &alignment);
    let describe = |files: &[PathBuf]| files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(",");
    let (src_files, tgt_files) = (describe(&cfg.paths.source), describe(&cfg.paths.target));
    (ds.meta.source, ds.meta.target) = match direction {
        Direction::Forward => (src_files, tgt_files),
        Direction::Reverse => (tgt_files, src_files),
    };
    info!("{}: {} queries, skipped {:?}", direction.label(), ds.len(), ds.meta.skips);

    let split = split_dataset(&ds, cfg.dataset.ratios, seed::derive(cfg.seed, &format!("split/{}", direction.name())))?;
    let files = layout.split(direction);
    create_parent(&files.train)?;
    write_split(&files, &split)?;
    Ok(split)
}

fn skipgram_seed(cfg: &PipelineConfig, role: GraphRole) -> u64 {
    seed::derive(cfg.seed, &format!("skipgram/{}", role.name()))
}

/// Random walks plus skip-gram over one graph.
pub fn cmd_train_embeddings(cfg: &PipelineConfig, role: GraphRole) -> Result<EmbeddingTable> {
    let layout = cfg.layout();
    let started = Instant::now();
    let kg = read_kg_file(&layout.graph(role))?;
    let table = embed(&kg, cfg.walks, cfg.skipgram, cfg.seed, role.name())?;
    let path = layout.embeddings(role);
    create_parent(&path)?;
    table.save(&path)?;
    info!("{} embeddings: {} tokens in {:.1?}", role.name(), table.len(), started.elapsed());
    Ok(table)
}

fn load_tables(cfg: &PipelineConfig, direction: Direction) -> Result<(EmbeddingTable, EmbeddingTable)> {
    let layout = cfg.layout();
    let (q, c) = direction.roles();
    let load = |role| EmbeddingTable::load(&layout.embeddings(role), skipgram_seed(cfg, role));
    Ok((load(q)?, load(c)?))
}

fn matcher_config(cfg: &PipelineConfig, direction: Direction) -> TrainConfig {
    let label = format!("matcher/{}/{}", direction.name(), cfg.matcher.model.name());
    TrainConfig { seed: seed::derive(cfg.seed, &label), ..cfg.matcher.train }
}

/// Trains the configured model kind; writes the checkpoint and the epoch log.
pub fn cmd_train_matcher(cfg: &PipelineConfig, direction: Direction) -> Result<TrainOutcome> {
    let layout = cfg.layout();
    let split = read_split(&layout.split(direction))?;
    let (query_table, cand_table) = load_tables(cfg, direction)?;
    let train_cfg = matcher_config(cfg, direction);
    let outcome = train(cfg.matcher.spec(), &expand_pairs(&split.train), &query_table, &cand_table, &train_cfg, &split.valid)?;
    for e in &outcome.log {
        info!("epoch {:>3}  nll {:.5}  valid mrr {}", e.epoch, e.mean_nll, e.valid_mrr.map_or("-".into(), |m| format!("{m:.4}")));
    }
    let checkpoint = Checkpoint {
        model: outcome.model.clone(),
        meta: CheckpointMeta {
            direction: direction.label().to_string(),
            train_config: Some(train_cfg),
            best_epoch: outcome.best_epoch,
            log: outcome.log.clone(),
        },
    };
    let path = layout.model(direction, cfg.matcher.model);
    create_parent(&path)?;
    checkpoint.save(&path)?;
    write_json(&layout.training_log(direction, cfg.matcher.model), &outcome.log)?;
    Ok(outcome)
}

/// Which scorer `evaluate` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerChoice {
    /// The trained checkpoint of the configured model kind.
    Model,
    /// Ground truth; a harness check.
    Oracle,
    /// Uniform random scores.
    Random,
}

/// Evaluates one split and writes `<stem>.json`, `<stem>.buckets.csv` and,
/// when types are available, `<stem>.types.csv`.
pub fn cmd_evaluate(cfg: &PipelineConfig, direction: Direction, split_name: &str, choice: ScorerChoice) -> Result<EvalReport> {
    let layout = cfg.layout();
    let files = layout.split(direction);
    let split_path = files
        .split_path(split_name)
        .ok_or_else(|| Error::Config(format!("unknown split {split_name:?} (expected train, valid or test)")))?;
    if !split_path.exists() {
        return Err(Error::io(split_path, std::io::Error::new(std::io::ErrorKind::NotFound, "dataset split not found")));
    }
    let split = read_split(&files)?;
    let ds = match split_name {
        "train" => &split.train,
        "test" => &split.test,
        _ => &split.valid,
    };
    let types = load_types(cfg)?;
    let max = ds.queries.iter().map(|q| q.candidate_count()).max().unwrap_or(2);
    let opts = EvalOptions {
        types: types.as_ref(),
        bucket_edges: Some(cfg.eval.bucket_edges.clone().unwrap_or_else(|| default_bucket_edges(max))),
    };

    let tables;
    let checkpoint;
    let (scorer, model_name): (Box<dyn Scorer + '_>, String) = match choice {
        ScorerChoice::Oracle => (Box::new(OracleScorer), "oracle".into()),
        ScorerChoice::Random => (Box::new(RandomScorer { seed: seed::derive(cfg.seed, "random-scorer") }), "random".into()),
        ScorerChoice::Model => {
            checkpoint = Checkpoint::load(&layout.model(direction, cfg.matcher.model))?;
            tables = load_tables(cfg, direction)?;
            let scorer = ModelScorer { model: &checkpoint.model, source: &tables.0, target: &tables.1 };
            (Box::new(scorer), checkpoint.model.kind().name().into())
        }
    };
    let meta = ReportMeta {
        model: model_name.clone(),
        dataset: direction.label().to_string(),
        split: split_name.to_string(),
        seed: Some(cfg.seed),
    };
    let report = evaluate(scorer.as_ref(), ds, &opts, meta)?;
    let stem = layout.report(direction, &model_name, split_name);
    let with_ext = |ext: &str| PathBuf::from(format!("{}.{ext}", stem.display()));
    write_with(&with_ext("json"), |w| writeln!(w, "{}", report.to_json()))?;
    write_with(&with_ext("buckets.csv"), |w| report.write_bucket_csv(w))?;
    if report.by_type.is_some() {
        write_with(&with_ext("types.csv"), |w| report.write_type_csv(w))?;
    }
    info!("{} {} MRR {:.4} over {} queries (random {:.4})", model_name, split_name, report.mrr, report.queries, report.random_baseline);
    Ok(report)
}

/// Training-size sweep; writes `<stem>.csv` and `<stem>.json`.
pub fn cmd_sweep(cfg: &PipelineConfig, direction: Direction) -> Result<SweepCurve> {
    let layout = cfg.layout();
    let split = read_split(&layout.split(direction))?;
    let (query_table, cand_table) = load_tables(cfg, direction)?;
    let sweep_cfg = SweepConfig {
        percents: cfg.eval.sweep_percents.clone(),
        repeats: cfg.eval.sweep_repeats.clone(),
        model: cfg.matcher.spec(),
        train: matcher_config(cfg, direction),
        seed: cfg.seed,
    };
    let curve = training_size_sweep(&split, &query_table, &cand_table, &sweep_cfg)?;
    let stem = layout.sweep(direction, cfg.matcher.model);
    write_with(&PathBuf::from(format!("{}.csv", stem.display())), |w| curve.write_csv(w))?;
    write_json(&PathBuf::from(format!("{}.json", stem.display())), &curve)?;
    Ok(curve)
}

/// Paths written by `synth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthFiles {
    pub source: PathBuf,
    pub target: PathBuf,
    pub alignment: PathBuf,
}

impl SynthFiles {
    pub fn in_dir(dir: &Path) -> Self {
        SynthFiles { source: dir.join("source.nt"), target: dir.join("target.nt"), alignment: dir.join("alignment.nt") }
    }
}

pub fn cmd_synth(spec: &SyntheticSpec, out_dir: &Path) -> Result<SynthFiles> {
    let twin = synth::generate(spec)?;
    let files = SynthFiles::in_dir(out_dir);
    for (path, triples) in [(&files.source, &twin.source), (&files.target, &twin.target), (&files.alignment, &twin.alignment)] {
        write_with(path, |w| write_ntriples(w, triples))?;
    }
    info!("synth: {} + {} triples, {} alignment links", twin.source.len(), twin.target.len(), twin.alignment.len());
    Ok(files)
}
