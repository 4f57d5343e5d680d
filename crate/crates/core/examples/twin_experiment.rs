//! Synthetic twin graphs end to end: MLP vs logistic regression vs random.
//!
//! cargo run --release --example twin_experiment -- [entities] [seed]

use kgmatch::matcher::TrainConfig;
use kgmatch::pipeline::{run_twin_experiment, ExperimentConfig};
use kgmatch::synth::SyntheticSpec;

fn main() -> kgmatch::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let entities = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(5000);
    let seed = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(1);
    let batch = args.get(3).and_then(|a| a.parse().ok()).unwrap_or(128);
    let spec = SyntheticSpec { entities, seed, ..Default::default() };
    let cfg = ExperimentConfig { seed, matcher: TrainConfig { batch_size: batch, ..Default::default() }, ..Default::default() };
    let t = std::time::Instant::now();
    let (prep, res) = run_twin_experiment(&spec, &cfg)?;
    println!("queries {} (train {}, valid {}, test {})", prep.dataset.len(), prep.split.train.len(), prep.split.valid.len(), prep.split.test.len());
    println!("mlp    {:.4}  (best epoch {})", res.mlp.mrr, res.mlp_training.best_epoch);
    println!("logreg {:.4}  (best epoch {})", res.logreg.mrr, res.logreg_training.best_epoch);
    println!("random {:.4}", res.mlp.random_baseline);
    for b in res.mlp.by_bucket.iter().flatten() {
        println!("  {:>10} n={:<5} mrr={}", b.label(), b.queries, b.mrr.map_or("-".into(), |m| format!("{m:.4}")));
    }
    for row in &res.mlp.by_type.as_ref().unwrap().rows {
        println!("  {:<14} n={:<5} mrr={:.4} cands={:.1}", row.label, row.queries, row.mrr, row.mean_candidates);
    }
    eprintln!("elapsed {:.1?}", t.elapsed());
    Ok(())
}
