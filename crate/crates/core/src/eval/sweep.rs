use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{subsample_training, DatasetSplit};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::matcher::{expand_pairs, train, ModelScorer, ModelSpec, TrainConfig};
use crate::seed;

/// Default training-set percentages for a sweep.
pub const DEFAULT_PERCENTS: [f64; 9] = [0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Percentages in `(0, 100]`.
    pub percents: Vec<f64>,
    /// Repeats per percentage; `None` uses [`default_repeats`].
    pub repeats: Option<Vec<usize>>,
    pub model: ModelSpec,
    pub train: TrainConfig,
    pub seed: u64,
}

/// 10 repeats for the four smallest fractions, 5 for the rest.
pub fn default_repeats(points: usize) -> Vec<usize> {
    (0..points).map(|i| if i < 4 { 10 } else { 5 }).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub percent: f64,
    /// Validation MRR of each repeat.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (0 for a single repeat).
    pub std: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub train_queries: usize,
    pub valid_queries: usize,
}

impl SweepPoint {
    fn from_values(percent: f64, values: Vec<f64>, train_queries: usize, valid_queries: usize) -> Self {
        let r = values.len() as f64;
        let mean = values.iter().sum::<f64>() / r;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt()
        } else {
            0.0
        };
        let half = 1.96 * std / r.sqrt();
        SweepPoint { percent, values, mean, std, ci_low: mean - half, ci_high: mean + half, train_queries, valid_queries }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub model: ModelSpec,
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    /// `percent,mean,ci_low,ci_high,std,repeats,train_queries,valid_queries`
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "percent,mean,ci_low,ci_high,std,repeats,train_queries,valid_queries")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                p.percent,
                p.mean,
                p.ci_low,
                p.ci_high,
                p.std,
                p.values.len(),
                p.train_queries,
                p.valid_queries
            )?;
        }
        Ok(())
    }
}

/// For each percentage: resample train ∪ valid with a fresh seed per
/// repeat, retrain, and record the MRR on the resampled validation set.
/// Cells run in parallel; each derives its own seed, so results do not
/// depend on scheduling.
pub fn training_size_sweep(
    split: &DatasetSplit,
    source: &EmbeddingTable,
    target: &EmbeddingTable,
    cfg: &SweepConfig,
) -> Result<SweepCurve> {
    if let Some(p) = cfg.percents.iter().find(|p| !(**p > 0.0 && **p <= 100.0)) {
        return Err(Error::Config(format!("sweep percentage {p} outside (0, 100]")));
    }
    let repeats = cfg.repeats.clone().unwrap_or_else(|| default_repeats(cfg.percents.len()));
    if repeats.len() != cfg.percents.len() || repeats.contains(&0) {
        return Err(Error::Config("need one positive repeat count per sweep percentage".into()));
    }
    let base = seed::derive(cfg.seed, "sweep");
    let cells: Vec<(usize, usize)> =
        repeats.iter().enumerate().flat_map(|(i, &r)| (0..r).map(move |j| (i, j))).collect();
    let results: Vec<(usize, f64, usize, usize)> = cells
        .par_iter()
        .map(|&(i, j)| {
            let cell_seed = seed::derive_indexed(base, (i * 1_000_000 + j) as u64);
            let sub = subsample_training(split, cfg.percents[i] / 100.0, cell_seed)?;
            let train_cfg = TrainConfig { seed: seed::derive(cell_seed, "matcher"), ..cfg.train };
            let out = train(cfg.model, &expand_pairs(&sub.train), source, target, &train_cfg, &sub.valid)?;
            let mrr = crate::eval::mean_reciprocal_rank(&ModelScorer { model: &out.model, source, target }, &sub.valid)?;
            Ok((i, mrr, sub.train.len(), sub.valid.len()))
        })
        .collect::<Result<_>>()?;
    let points = cfg
        .percents
        .iter()
        .enumerate()
        .map(|(i, &pct)| {
            let mine: Vec<_> = results.iter().filter(|r| r.0 == i).collect();
            SweepPoint::from_values(pct, mine.iter().map(|r| r.1).collect(), mine[0].2, mine[0].3)
        })
        .collect();
    Ok(SweepCurve { model: cfg.model, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeats_policy() {
        assert_eq!(default_repeats(DEFAULT_PERCENTS.len()), vec![10, 10, 10, 10, 5, 5, 5, 5, 5]);
    }

    #[test]
    fn confidence_interval() {
        let p = SweepPoint::from_values(1.0, vec![0.5, 0.7, 0.6], 10, 2);
        assert!((p.mean - 0.6).abs() < 1e-12);
        assert!((p.std - 0.1).abs() < 1e-12);
        let half = 1.96 * 0.1 / 3f64.sqrt();
        assert!((p.ci_high - p.mean - half).abs() < 1e-12);
        assert!((p.mean - p.ci_low - half).abs() < 1e-12);
        let single = SweepPoint::from_values(100.0, vec![0.8], 10, 2);
        assert_eq!((single.ci_low, single.ci_high), (0.8, 0.8));
    }

    #[test]
    fn rejects_bad_config() {
        let split = DatasetSplit {
            train: Default::default(),
            valid: Default::default(),
            test: Default::default(),
            ratios: crate::dataset::DEFAULT_RATIOS,
            seed: 0,
        };
        let t = EmbeddingTable::new(2, 0);
        let mut cfg = SweepConfig {
            percents: vec![0.0],
            repeats: None,
            model: ModelSpec::logreg(),
            train: TrainConfig::default(),
            seed: 0,
        };
        assert!(training_size_sweep(&split, &t, &t, &cfg).is_err());
        cfg.percents = vec![50.0];
        cfg.repeats = Some(vec![1, 2]);
        assert!(training_size_sweep(&split, &t, &t, &cfg).is_err());
    }
}
