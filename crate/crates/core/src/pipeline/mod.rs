//! File-level pipeline stages and in-memory experiments.
//!
//! Each `cmd_*` function reads its inputs from, and writes its artifacts to,
//! the work directory described by [`Layout`]. One global seed fans out to
//! stage seeds by stable hashing, so any stage can be rerun on its own and
//! reproduces the same bytes.

mod commands;
mod config;
mod experiment;

pub use commands::{
    cmd_build_dataset, cmd_evaluate, cmd_ingest, cmd_sweep, cmd_synth, cmd_train_embeddings, cmd_train_matcher,
    IngestSummary, ScorerChoice, SynthFiles,
};
pub use config::{
    AlignmentConfig, DatasetSection, Direction, EvalSection, GraphConfig, GraphRole, Layout, MatcherSection, NameConfig,
    Paths, PipelineConfig,
};
pub use experiment::{prepare_twin, run_twin_experiment, ExperimentConfig, PreparedTwin, TwinResult};
