//! Entity matching across two knowledge graphs.
//!
//! The crate covers the whole pipeline:
//!
//! - [`rdf`]: streaming N-Triples parsing into an interned multigraph, plus
//!   name and `owl:sameAs` alignment extraction.
//! - [`name_index`]: inverted index from normalized names to entity ids.
//! - [`dataset`]: ambiguous-candidate matching datasets, splits and statistics.
//! - [`embeddings`]: uniform random walks and skip-gram (negative sampling)
//!   entity embeddings, stored in word2vec text format.
//! - [`matcher`]: point-wise MLP / logistic-regression match classifiers
//!   trained with Adam on the negative log-likelihood.
//! - [`eval`]: mean reciprocal rank, breakdowns, random baselines and
//!   training-size sweeps.
//! - [`synth`]: twin-graph generator for desk-scale experiments.
//! - [`pipeline`]: file-level orchestration used by the `kgmatch` binary.
//!
//! Runnable walkthroughs live in `examples/`; see the README for the list.

mod binio;
pub mod dataset;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod matcher;
pub mod name_index;
pub mod pipeline;
pub mod rdf;
pub mod seed;
pub mod synth;
pub mod typemap;

pub use error::{Error, Result};
