use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rdf::{EntityId, Kg};
use crate::seed;

/// Prefix that marks predicate tokens. IRIs cannot start with `~`, so
/// predicate and entity tokens never collide.
pub const PREDICATE_PREFIX: &str = "~";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WalkConfig {
    /// Walks started from every entity (k).
    pub walks_per_entity: usize,
    /// Maximum hops per walk (l).
    pub depth: usize,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { walks_per_entity: 20, depth: 4, seed: 0 }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walks_per_entity == 0 {
            return Err(Error::Config("walks_per_entity (k) must be at least 1".into()));
        }
        if self.depth == 0 {
            return Err(Error::Config("walk depth (l) must be at least 1".into()));
        }
        Ok(())
    }
}

/// Token sequences over a string vocabulary, stored flat.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WalkCorpus {
    vocab: Vec<String>,
    tokens: Vec<u32>,
    offsets: Vec<usize>,
}

impl WalkCorpus {
    /// Builds a corpus from string sentences, interning tokens in first-seen order.
    pub fn from_sentences<S: AsRef<str>>(sentences: &[Vec<S>]) -> Self {
        let mut index = std::collections::HashMap::new();
        let mut corpus = WalkCorpus { offsets: vec![0], ..Default::default() };
        for sentence in sentences {
            for tok in sentence {
                let tok = tok.as_ref();
                let id = *index.entry(tok.to_string()).or_insert_with(|| {
                    corpus.vocab.push(tok.to_string());
                    (corpus.vocab.len() - 1) as u32
                });
                corpus.tokens.push(id);
            }
            corpus.offsets.push(corpus.tokens.len());
        }
        corpus
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn token(&self, id: u32) -> &str {
        &self.vocab[id as usize]
    }

    /// Number of sequences.
    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn walk(&self, i: usize) -> &[u32] {
        &self.tokens[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn walks(&self) -> impl ExactSizeIterator<Item = &[u32]> {
        (0..self.len()).map(move |i| self.walk(i))
    }

    /// One walk per line, tokens separated by spaces.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for walk in self.walks() {
            let line: Vec<&str> = walk.iter().map(|&t| self.token(t)).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

fn walks_from(kg: &Kg, start: EntityId, cfg: &WalkConfig, out: &mut Vec<u32>, lengths: &mut Vec<usize>) {
    let n = kg.entity_count() as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive_indexed(cfg.seed, u64::from(start.0)));
    for _ in 0..cfg.walks_per_entity {
        let before = out.len();
        out.push(start.0);
        let mut cur = start;
        for _ in 0..cfg.depth {
            let edges = kg.out_edges(cur);
            if edges.is_empty() {
                break;
            }
            let edge = edges[rng.random_range(0..edges.len())];
            out.push(n + edge.predicate.0);
            out.push(edge.object.0);
            cur = edge.object;
        }
        lengths.push(out.len() - before);
    }
}

/// `k` uniform random walks of up to `l` hops from every entity.
///
/// Each step picks one outgoing edge uniformly (parallel edges count
/// separately); walks stop early at sinks. Token ids `0..n` are entities,
/// `n..` are predicates (spelled with [`PREDICATE_PREFIX`]). Every start
/// entity draws from its own seeded stream, so the corpus does not depend
/// on the thread count.
pub fn generate_walks(kg: &Kg, cfg: &WalkConfig) -> Result<WalkCorpus> {
    cfg.validate()?;
    if kg.is_empty() {
        return Err(Error::Data("cannot generate walks over an empty graph".into()));
    }
    let per_entity: Vec<(Vec<u32>, Vec<usize>)> = kg
        .entity_ids()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&e| {
            let mut toks = Vec::with_capacity(cfg.walks_per_entity * (2 * cfg.depth + 1));
            let mut lens = Vec::with_capacity(cfg.walks_per_entity);
            walks_from(kg, e, cfg, &mut toks, &mut lens);
            (toks, lens)
        })
        .collect();

    let mut vocab: Vec<String> = kg.entity_ids().map(|e| kg.entity_iri(e).to_string()).collect();
    vocab.extend((0..kg.predicate_count() as u32).map(|p| {
        format!("{PREDICATE_PREFIX}{}", kg.predicate_iri(crate::rdf::PredicateId(p)))
    }));
    let total: usize = per_entity.iter().map(|(t, _)| t.len()).sum();
    let mut corpus = WalkCorpus { vocab, tokens: Vec::with_capacity(total), offsets: vec![0] };
    for (toks, lens) in per_entity {
        for len in lens {
            let start = *corpus.offsets.last().unwrap();
            corpus.offsets.push(start + len);
        }
        corpus.tokens.extend(toks);
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{build_graph, Literal, PredicateFilter, Triple};

    fn kg(ts: &[Triple]) -> Kg {
        build_graph(ts, &PredicateFilter::default())
    }

    #[test]
    fn sink_entity_yields_single_token_walks() {
        let g = kg(&[Triple::literal("http://e", "http://n", Literal::plain("E"))]);
        let c = generate_walks(&g, &WalkConfig { walks_per_entity: 3, depth: 4, seed: 1 }).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.walks().all(|w| w == [0]));
    }

    #[test]
    fn chain_is_followed_to_the_sink() {
        let g = kg(&[
            Triple::resource("http://a", "http://p", "http://b"),
            Triple::resource("http://b", "http://q", "http://c"),
        ]);
        let c = generate_walks(&g, &WalkConfig { walks_per_entity: 1, depth: 4, seed: 1 }).unwrap();
        let words: Vec<&str> = c.walk(0).iter().map(|&t| c.token(t)).collect();
        assert_eq!(words, ["http://a", "~http://p", "http://b", "~http://q", "http://c"]);
    }

    #[test]
    fn config_and_empty_graph_rejected() {
        let g = kg(&[Triple::resource("http://a", "http://p", "http://b")]);
        assert!(generate_walks(&g, &WalkConfig { walks_per_entity: 0, depth: 4, seed: 0 }).is_err());
        assert!(generate_walks(&g, &WalkConfig { walks_per_entity: 1, depth: 0, seed: 0 }).is_err());
        assert!(generate_walks(&kg(&[]), &WalkConfig::default()).is_err());
    }

    #[test]
    fn text_output() {
        let c = WalkCorpus::from_sentences(&[vec!["a", "~p", "b"], vec!["c"]]);
        let mut out = Vec::new();
        c.write_text(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a ~p b\nc\n");
        assert_eq!(c.len(), 2);
        assert_eq!(c.token_count(), 4);
    }
}
