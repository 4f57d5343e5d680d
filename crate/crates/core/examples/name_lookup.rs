//! Build a name index and look up ambiguous names under both
//! normalization policies.
//!
//! cargo run --example name_lookup

use kgmatch::name_index::{normalize_name, NameIndex, NormalizationPolicy};
use kgmatch::rdf::{build_graph, extract_names, Literal, PredicateFilter, Triple, RDFS_LABEL};

fn main() -> kgmatch::Result<()> {
    let labels = [
        ("Q1", "John Burt"),
        ("Q2", "John  Burt"),
        ("Q3", "john burt"),
        ("Q4", "John Burt"),
        ("Q5", "Leith Athletic F.C."),
    ];
    let triples: Vec<Triple> = labels
        .iter()
        .map(|(q, l)| Triple::literal(format!("http://www.wikidata.org/entity/{q}"), RDFS_LABEL, Literal::tagged(*l, "en")))
        .collect();
    let kg = build_graph(&triples, &PredicateFilter::default());
    let names = extract_names(&kg, &[RDFS_LABEL]);

    for policy in [NormalizationPolicy::Exact, NormalizationPolicy::Casefold] {
        let index = NameIndex::build(&names, policy);
        let hits: Vec<&str> = index.lookup("John Burt").iter().map(|&id| kg.entity_iri(id)).collect();
        println!("{policy:?}: key {:?} -> {hits:?}", normalize_name("John Burt", policy));
        println!("  {} keys, {} postings", index.key_count(), index.posting_count());
    }

    let index = NameIndex::build(&names, NormalizationPolicy::Exact);
    let mut tsv = Vec::new();
    index.write_tsv(&mut tsv)?;
    print!("{}", String::from_utf8_lossy(&tsv));
    Ok(())
}
