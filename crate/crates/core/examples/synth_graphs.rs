//! Generate twin graphs and show the name-collision distribution.
//!
//! cargo run --example synth_graphs [entities] [zipf exponent]

use std::collections::BTreeMap;

use kgmatch::synth::{collision_groups, generate, SyntheticSpec};

fn main() -> kgmatch::Result<()> {
    let mut args = std::env::args().skip(1);
    let entities = args.next().and_then(|a| a.parse().ok()).unwrap_or(5000);
    let zipf_exponent = args.next().and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let spec = SyntheticSpec { entities, zipf_exponent, ..Default::default() };

    let mut per_size: BTreeMap<usize, usize> = BTreeMap::new();
    for g in collision_groups(&spec) {
        *per_size.entry(g).or_default() += g;
    }
    println!("group size -> entities (= queries with that many candidates)");
    for (size, n) in &per_size {
        println!("{size:>4} {n:>6} {}", "#".repeat(n / 10));
    }

    let twin = generate(&spec)?;
    println!("source {} triples, target {} triples, {} links", twin.source.len(), twin.target.len(), twin.alignment.len());
    for t in twin.source.iter().take(3).chain(twin.target.iter().take(3)).chain(twin.alignment.iter().take(1)) {
        println!("{t}");
    }
    Ok(())
}
