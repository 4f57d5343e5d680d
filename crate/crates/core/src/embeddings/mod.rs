//! Walk-based entity embeddings.
//!
//! A [`Kg`](crate::rdf::Kg) is unfolded into token sequences by uniform
//! random walks ([`generate_walks`]), and a skip-gram model with negative
//! sampling is trained over them ([`train_skipgram`]). Entity vectors are
//! served from an [`EmbeddingTable`], with a deterministic random fallback
//! for tokens that have no trained vector.

mod skipgram;
mod table;
mod walks;

pub use skipgram::{sgns_gradient, sgns_loss, train_skipgram, SgnsGradient, SkipgramConfig, SkipgramOutput};
pub use table::EmbeddingTable;
pub use walks::{generate_walks, WalkConfig, WalkCorpus, PREDICATE_PREFIX};
