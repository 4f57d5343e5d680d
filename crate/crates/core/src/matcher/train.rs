use log::{debug, info};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamConfig};
use super::model::{featurize, MatcherModel, ModelSpec, Workspace};
use crate::dataset::{MatchDataset, MatchQuery};
use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::eval::{self, Scorer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-3,
            batch_size: 1024,
            max_epochs: 20,
            patience: 3,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate {} must be positive", self.learning_rate)));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.max_epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub query: String,
    pub candidate: String,
    pub label: bool,
}

/// One positive pair plus one negative pair per other candidate, in
/// query then candidate order.
pub fn expand_pairs(ds: &MatchDataset) -> Vec<LabeledPair> {
    ds.queries
        .iter()
        .flat_map(|q| {
            q.candidates.iter().enumerate().map(move |(i, c)| LabeledPair {
                query: q.query.clone(),
                candidate: c.clone(),
                label: i == q.positive,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub mean_nll: f64,
    /// `None` when no validation set was given.
    pub valid_mrr: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the best validation MRR (the last
    /// epoch when there is no validation set).
    pub model: MatcherModel,
    pub log: Vec<EpochLog>,
    pub best_epoch: usize,
}

/// Mini-batch Adam on mean NLL. Single-threaded, so the result depends only
/// on the inputs and `cfg.seed`.
pub fn train(
    spec: ModelSpec,
    pairs: &[LabeledPair],
    source: &EmbeddingTable,
    target: &EmbeddingTable,
    cfg: &TrainConfig,
    valid: &MatchDataset,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if pairs.is_empty() {
        return Err(Error::Data("no training pairs".into()));
    }
    if source.dim() != target.dim() {
        return Err(Error::Data(format!("source dimension {} != target dimension {}", source.dim(), target.dim())));
    }
    let n = 2 * source.dim();
    let mut features = Vec::with_capacity(pairs.len() * n);
    for p in pairs {
        features.extend(featurize(&source.vector(&p.query), &target.vector(&p.candidate))?);
    }
    let labels: Vec<bool> = pairs.iter().map(|p| p.label).collect();

    let mut model = MatcherModel::xavier(spec, n, cfg.seed)?;
    let mut adam = Adam::new(model.params().len(), cfg.learning_rate, cfg.adam);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x005e_ed0f_0a1c);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut grad = vec![0.0; model.params().len()];
    let mut ws = Workspace::default();

    let mut log = Vec::new();
    let mut best: Option<(f64, usize, MatcherModel)> = None;
    let mut stale = 0;
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                total += model.accumulate_gradient(&features[i * n..(i + 1) * n], labels[i], &mut grad, &mut ws);
            }
            let scale = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= scale);
            adam.step(model.params_mut(), &grad);
        }
        if model.params().iter().any(|p| !p.is_finite()) {
            return Err(Error::Data(format!("training diverged in epoch {epoch}")));
        }
        let mean_nll = total / pairs.len() as f64;
        let valid_mrr = if valid.is_empty() {
            None
        } else {
            Some(eval::mean_reciprocal_rank(&ModelScorer { model: &model, source, target }, valid)?)
        };
        debug!("epoch {epoch}: nll {mean_nll:.5}, valid mrr {valid_mrr:?}");
        log.push(EpochLog { epoch, mean_nll, valid_mrr });

        match valid_mrr {
            None => best = Some((f64::NEG_INFINITY, epoch, model.clone())),
            Some(mrr) if best.as_ref().is_none_or(|(b, _, _)| mrr > *b) => {
                best = Some((mrr, epoch, model.clone()));
                stale = 0;
            }
            Some(_) => {
                stale += 1;
                if stale >= cfg.patience {
                    info!("early stop after epoch {epoch}");
                    break;
                }
            }
        }
    }
    let (_, best_epoch, model) = best.expect("at least one epoch");
    Ok(TrainOutcome { model, log, best_epoch })
}

/// Scores candidates by match probability under a trained model.
#[derive(Debug, Clone, Copy)]
pub struct ModelScorer<'a> {
    pub model: &'a MatcherModel,
    pub source: &'a EmbeddingTable,
    pub target: &'a EmbeddingTable,
}

impl Scorer for ModelScorer<'_> {
    fn scores(&self, q: &MatchQuery) -> Result<Vec<f64>> {
        let qv = self.source.vector(&q.query);
        q.candidates
            .iter()
            .map(|c| self.model.p_match(&featurize(&qv, &self.target.vector(c))?))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    /// `(candidate index, p_match)`, best first.
    pub order: Vec<(usize, f64)>,
    /// 1-based.
    pub positive_rank: usize,
}

/// Candidates by descending match probability; ties keep input order.
pub fn rank_candidates(
    model: &MatcherModel,
    query: &MatchQuery,
    source: &EmbeddingTable,
    target: &EmbeddingTable,
) -> Result<Ranking> {
    let scores = ModelScorer { model, source, target }.scores(query)?;
    let order: Vec<(usize, f64)> = eval::rank_order(&scores).into_iter().map(|i| (i, scores[i])).collect();
    let positive_rank = order.iter().position(|&(i, _)| i == query.positive).expect("positive in range") + 1;
    Ok(Ranking { order, positive_rank })
}
