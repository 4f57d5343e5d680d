//! The file-based pipeline driven by a TOML configuration, as the
//! `kgmatch` binary runs it: synth, ingest, dataset, embeddings, matcher,
//! evaluation.
//!
//! cargo run --release --example file_pipeline [work dir]

use std::path::PathBuf;

use kgmatch::pipeline::{self, Direction, GraphRole, PipelineConfig, ScorerChoice};
use kgmatch::synth::SyntheticSpec;

fn main() -> kgmatch::Result<()> {
    let root = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("kgmatch-demo"));
    let data = root.join("data");
    let files = pipeline::cmd_synth(&SyntheticSpec { entities: 1000, seed: 5, ..Default::default() }, &data)?;

    let cfg = PipelineConfig::from_toml(&format!(
        r#"
        seed = 5
        [paths]
        source = [{:?}]
        target = [{:?}]
        alignment = [{:?}]
        work_dir = {:?}
        [matcher]
        hidden = 64
        batch_size = 128
        "#,
        files.source,
        files.target,
        files.alignment,
        root.join("work"),
    ))?;
    cfg.validate()?;

    for role in [GraphRole::Source, GraphRole::Target] {
        println!("{:?}", pipeline::cmd_ingest(&cfg, role)?);
        pipeline::cmd_train_embeddings(&cfg, role)?;
    }
    let split = pipeline::cmd_build_dataset(&cfg, Direction::Forward)?;
    println!("split: {} / {} / {}", split.train.len(), split.valid.len(), split.test.len());
    let outcome = pipeline::cmd_train_matcher(&cfg, Direction::Forward)?;
    println!("best epoch {}", outcome.best_epoch);
    for choice in [ScorerChoice::Model, ScorerChoice::Random, ScorerChoice::Oracle] {
        let r = pipeline::cmd_evaluate(&cfg, Direction::Forward, "test", choice)?;
        println!("{:<7} MRR {:.4} (analytic random {:.4})", r.meta.model, r.mrr, r.random_baseline);
    }
    println!("artifacts under {}", cfg.layout().root.display());
    Ok(())
}
