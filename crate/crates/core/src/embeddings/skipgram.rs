use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::table::EmbeddingTable;
use super::walks::WalkCorpus;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SkipgramConfig {
    pub dim: usize,
    /// Maximum context distance; each center draws an effective window in `1..=window`.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial learning rate, decayed linearly to `learning_rate * 1e-4`.
    pub learning_rate: f64,
    /// Frequent-token subsampling threshold; 0 disables.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for SkipgramConfig {
    fn default() -> Self {
        SkipgramConfig { dim: 32, window: 5, negatives: 5, epochs: 5, learning_rate: 0.025, subsample: 0.0, seed: 0 }
    }
}

impl SkipgramConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.dim == 0 {
            return bad("embedding dimension must be at least 1");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.negatives == 0 {
            return bad("negatives must be at least 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(self.subsample >= 0.0) {
            return bad("subsample threshold must be non-negative");
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln σ(x)` without overflow.
fn log_sigmoid(x: f64) -> f64 {
    -((-x).max(0.0) + (-x.abs()).exp().ln_1p())
}

/// `∂/∂f` of `-ln σ(f)` (label 1) or `-ln σ(-f)` (label 0).
#[inline]
fn coefficient(score: f64, label: f64) -> f64 {
    sigmoid(score) - label
}

/// Negative-sampling loss for one (center, context) pair:
/// `-ln σ(u·v) - Σ ln σ(-u_neg·v)`.
pub fn sgns_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    -log_sigmoid(dot(center, context)) - negatives.iter().map(|n| log_sigmoid(-dot(center, n))).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsGradient {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Analytic gradient of [`sgns_loss`] with respect to every vector.
pub fn sgns_gradient(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> SgnsGradient {
    let g = coefficient(dot(center, context), 1.0);
    let mut grad_center: Vec<f64> = context.iter().map(|u| g * u).collect();
    let grad_context = center.iter().map(|v| g * v).collect();
    let mut grad_negs = Vec::with_capacity(negatives.len());
    for n in negatives {
        let g = coefficient(dot(center, n), 0.0);
        grad_center.iter_mut().zip(n.iter()).for_each(|(c, u)| *c += g * u);
        grad_negs.push(center.iter().map(|v| g * v).collect());
    }
    SgnsGradient { center: grad_center, context: grad_context, negatives: grad_negs }
}

pub struct SkipgramOutput {
    /// Input (center) vectors for every token that occurs in the corpus.
    pub table: EmbeddingTable,
    /// Mean per-pair loss of each epoch.
    pub epoch_loss: Vec<f64>,
}

struct Trainer {
    dim: usize,
    input: Vec<f64>,
    output: Vec<f64>,
    grad: Vec<f64>,
}

impl Trainer {
    /// One SGD step on the pair objective; returns the pair loss.
    fn step(&mut self, center: usize, targets: &[(usize, f64)], lr: f64) -> f64 {
        let d = self.dim;
        let v = &mut self.input[center * d..(center + 1) * d];
        self.grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        for &(t, label) in targets {
            let u = &mut self.output[t * d..(t + 1) * d];
            let f = dot(v, u);
            loss -= if label > 0.5 { log_sigmoid(f) } else { log_sigmoid(-f) };
            let g = coefficient(f, label);
            for k in 0..d {
                self.grad[k] += g * u[k];
                u[k] -= lr * g * v[k];
            }
        }
        for k in 0..d {
            v[k] -= lr * self.grad[k];
        }
        loss
    }
}

/// Skip-gram with negative sampling over the walk corpus.
///
/// Negatives come from the unigram distribution raised to the 3/4 power.
/// Walks are visited in a fresh seeded order each epoch; training is
/// single-threaded and fully determined by `(corpus, cfg)`.
pub fn train_skipgram(corpus: &WalkCorpus, cfg: &SkipgramConfig) -> Result<SkipgramOutput> {
    cfg.validate()?;
    if corpus.token_count() == 0 {
        return Err(Error::Data("cannot train embeddings on an empty corpus".into()));
    }

    // Dense ids for tokens that actually occur.
    let mut counts = vec![0u64; corpus.vocab().len()];
    for w in corpus.walks() {
        for &t in w {
            counts[t as usize] += 1;
        }
    }
    let mut remap = vec![u32::MAX; counts.len()];
    let mut kept_tokens = Vec::new();
    let mut kept_counts = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            remap[i] = kept_tokens.len() as u32;
            kept_tokens.push(corpus.vocab()[i].clone());
            kept_counts.push(c);
        }
    }
    let vocab_size = kept_tokens.len();
    let total_tokens: u64 = kept_counts.iter().sum();

    let d = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(cfg.seed, "skipgram"));
    let half = 0.5 / d as f64;
    let mut trainer = Trainer {
        dim: d,
        input: (0..vocab_size * d).map(|_| rng.random_range(-half..half)).collect(),
        output: vec![0.0; vocab_size * d],
        grad: vec![0.0; d],
    };

    let noise = WeightedIndex::new(kept_counts.iter().map(|&c| (c as f64).powf(0.75)))
        .map_err(|e| Error::Data(format!("negative-sampling distribution: {e}")))?;
    let keep_prob: Vec<f64> = kept_counts
        .iter()
        .map(|&c| {
            if cfg.subsample <= 0.0 {
                return 1.0;
            }
            let f = c as f64 / total_tokens as f64;
            (((f / cfg.subsample).sqrt() + 1.0) * cfg.subsample / f).min(1.0)
        })
        .collect();

    let planned = (cfg.epochs as u64 * total_tokens) as f64;
    let mut processed = 0u64;
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut sentence = Vec::new();
    let mut targets = Vec::with_capacity(cfg.negatives + 1);
    let mut epoch_loss = Vec::with_capacity(cfg.epochs);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let (mut loss_sum, mut pairs) = (0.0, 0u64);
        for &wi in &order {
            let walk = corpus.walk(wi);
            processed += walk.len() as u64;
            sentence.clear();
            for &t in walk {
                let t = remap[t as usize] as usize;
                if keep_prob[t] >= 1.0 || rng.random::<f64>() < keep_prob[t] {
                    sentence.push(t);
                }
            }
            let lr = cfg.learning_rate * (1.0 - processed as f64 / planned).max(1e-4);
            for i in 0..sentence.len() {
                let w = rng.random_range(1..=cfg.window);
                let lo = i.saturating_sub(w);
                let hi = (i + w).min(sentence.len() - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let context = sentence[j];
                    targets.clear();
                    targets.push((context, 1.0));
                    for _ in 0..cfg.negatives {
                        let n = noise.sample(&mut rng);
                        if n != context {
                            targets.push((n, 0.0));
                        }
                    }
                    loss_sum += trainer.step(sentence[i], &targets, lr);
                    pairs += 1;
                }
            }
        }
        epoch_loss.push(if pairs == 0 { 0.0 } else { loss_sum / pairs as f64 });
    }

    let table = EmbeddingTable::from_parts(d, kept_tokens, trainer.input, cfg.seed)?;
    Ok(SkipgramOutput { table, epoch_loss })
}
