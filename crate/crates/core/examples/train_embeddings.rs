//! Random walks over a graph and skip-gram embeddings, written in word2vec
//! text format.
//!
//! cargo run --release --example train_embeddings

use kgmatch::embeddings::{generate_walks, train_skipgram, SkipgramConfig, WalkConfig};
use kgmatch::rdf::{build_graph, PredicateFilter};
use kgmatch::synth::{generate, source_iri, SyntheticSpec};

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (norm(a) * norm(b))
}

fn main() -> kgmatch::Result<()> {
    let twin = generate(&SyntheticSpec { entities: 500, seed: 2, ..Default::default() })?;
    let kg = build_graph(&twin.source, &PredicateFilter::default());

    let corpus = generate_walks(&kg, &WalkConfig { walks_per_entity: 20, depth: 4, seed: 1 })?;
    println!("{} walks, {} tokens, vocabulary {}", corpus.len(), corpus.token_count(), corpus.vocab().len());
    let first: Vec<&str> = corpus.walk(0).iter().map(|&t| corpus.token(t)).collect();
    println!("walk 0: {first:?}");

    let out = train_skipgram(&corpus, &SkipgramConfig { dim: 32, seed: 1, ..Default::default() })?;
    println!("loss per epoch: {:?}", out.epoch_loss.iter().map(|l| format!("{l:.4}")).collect::<Vec<_>>());

    // Same-type entities should sit closer than different-type ones.
    let (mut same, mut diff) = (Vec::new(), Vec::new());
    for i in 0..100 {
        for j in (i + 1)..100 {
            let c = cosine(&out.table.vector(&source_iri(i)), &out.table.vector(&source_iri(j)));
            if twin.entity_types[i] == twin.entity_types[j] { same.push(c) } else { diff.push(c) }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    println!("mean cosine: same type {:.3}, different type {:.3}", mean(&same), mean(&diff));

    let mut text = Vec::new();
    out.table.write_text(&mut text)?;
    let header = String::from_utf8_lossy(&text[..text.iter().position(|&b| b == b'\n').unwrap()]).to_string();
    println!("word2vec header: {header}");
    Ok(())
}
