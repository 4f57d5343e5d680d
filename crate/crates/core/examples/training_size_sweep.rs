//! Validation MRR against training-set size with 95% confidence intervals.
//!
//! cargo run --release --example training_size_sweep

use kgmatch::eval::{training_size_sweep, SweepConfig};
use kgmatch::matcher::{ModelSpec, TrainConfig};
use kgmatch::pipeline::{prepare_twin, ExperimentConfig};
use kgmatch::synth::SyntheticSpec;

fn main() -> kgmatch::Result<()> {
    let spec = SyntheticSpec { entities: 2000, seed: 8, ..Default::default() };
    let prep = prepare_twin(&spec, &ExperimentConfig { seed: 8, ..Default::default() })?;
    let cfg = SweepConfig {
        percents: vec![1.0, 10.0, 50.0, 100.0],
        repeats: Some(vec![5, 5, 3, 3]),
        model: ModelSpec::mlp(64),
        train: TrainConfig { batch_size: 128, ..Default::default() },
        seed: 8,
    };
    let curve = training_size_sweep(&prep.split, &prep.source_table, &prep.target_table, &cfg)?;
    curve.write_csv(&mut std::io::stdout())?;
    Ok(())
}
