//! Train the MLP and logistic-regression matchers on prepared twin data and
//! rank the candidates of one test query.
//!
//! cargo run --release --example train_matcher

use kgmatch::matcher::{rank_candidates, ModelSpec, TrainConfig};
use kgmatch::pipeline::{prepare_twin, ExperimentConfig};
use kgmatch::synth::SyntheticSpec;

fn main() -> kgmatch::Result<()> {
    let spec = SyntheticSpec { entities: 2000, seed: 4, ..Default::default() };
    let prep = prepare_twin(&spec, &ExperimentConfig { seed: 4, ..Default::default() })?;
    let cfg = TrainConfig { batch_size: 128, seed: 4, ..Default::default() };

    for model_spec in [ModelSpec::mlp(64), ModelSpec::logreg()] {
        let out = prep.train(model_spec, &cfg)?;
        println!("{:?}: best epoch {}", model_spec.kind, out.best_epoch);
        for e in &out.log {
            println!("  epoch {:>2} nll {:.4} valid mrr {:.4}", e.epoch, e.mean_nll, e.valid_mrr.unwrap_or(f64::NAN));
        }
        let q = &prep.split.test.queries[0];
        let ranking = rank_candidates(&out.model, q, &prep.source_table, &prep.target_table)?;
        println!("  query {} ({:?}): positive ranked {}", q.query, q.name, ranking.positive_rank);
        for (i, p) in ranking.order.iter().take(3) {
            println!("    {:.4} {}", p, q.candidates[*i]);
        }
    }
    Ok(())
}
