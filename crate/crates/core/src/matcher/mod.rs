//! Point-wise match classifier over concatenated (query, candidate) embeddings.
//!
//! Two model kinds share one interface: an MLP with a single ReLU hidden
//! layer and a two-way softmax head, and a logistic-regression baseline
//! (equivalently, a softmax over logits `[0, w·x + b]`). Both are trained
//! with Adam on the mean negative log-likelihood, and candidates are ranked
//! by the match probability.

mod adam;
mod checkpoint;
mod model;
mod train;

pub use adam::{Adam, AdamConfig};
pub use checkpoint::{Checkpoint, CheckpointMeta};
pub use model::{featurize, softmax2, MatcherModel, ModelKind, ModelSpec};
pub use train::{expand_pairs, rank_candidates, train, EpochLog, LabeledPair, ModelScorer, Ranking, TrainConfig, TrainOutcome};
