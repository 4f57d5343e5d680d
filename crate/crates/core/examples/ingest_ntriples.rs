//! Parse N-Triples (plain or gzipped), build the graph, extract names and
//! the sameAs alignment, and round-trip the binary snapshot.
//!
//! cargo run --example ingest_ntriples [file.nt[.gz]]

use std::io::Cursor;

use kgmatch::rdf::{
    build_graph, extract_alignment, extract_names, open_ntriples, parse_ntriples, read_kg, write_kg,
    DisambiguationFilter, PredicateFilter, FOAF_NAME, OWL_SAME_AS, RDFS_LABEL,
};

const SAMPLE: &str = r#"<http://dbpedia.org/resource/John_Burt_(footballer)> <http://xmlns.com/foaf/0.1/name> "John Burt"@en .
<http://dbpedia.org/resource/John_Burt_(footballer)> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://dbpedia.org/ontology/Person> .
<http://dbpedia.org/resource/John_Burt_(footballer)> <http://dbpedia.org/ontology/team> <http://dbpedia.org/resource/Leith_Athletic> .
<http://dbpedia.org/resource/Leith_Athletic> <http://www.w3.org/2000/01/rdf-schema#label> "Leith Athletic F.C."@en .
this line is not a triple
<http://dbpedia.org/resource/John_Burt_(footballer)> <http://www.w3.org/2002/07/owl#sameAs> <http://www.wikidata.org/entity/Q6220590> .
"#;

fn main() -> kgmatch::Result<()> {
    let outcome = match std::env::args().nth(1) {
        Some(path) => parse_ntriples(open_ntriples(path.as_ref())?)?,
        None => parse_ntriples(Cursor::new(SAMPLE))?,
    };
    println!("{} triples, {} malformed lines", outcome.triples.len(), outcome.malformed);
    for e in &outcome.errors {
        println!("  line {}: {}", e.line, e.message);
    }

    let mut filter = PredicateFilter::default();
    filter.drop.insert(OWL_SAME_AS.to_string());
    let kg = build_graph(&outcome.triples, &filter);
    println!("graph: {} entities, {} edges, {} literals", kg.entity_count(), kg.edge_count(), kg.literal_count());

    for (id, names) in extract_names(&kg, &[FOAF_NAME, RDFS_LABEL]) {
        println!("  {} -> {:?}", kg.entity_iri(id), names);
    }

    // The alignment needs both graphs; here the target is a one-entity stub.
    let target = build_graph(
        &[kgmatch::rdf::Triple::literal(
            "http://www.wikidata.org/entity/Q6220590",
            RDFS_LABEL,
            kgmatch::rdf::Literal::tagged("John Burt", "en"),
        )],
        &PredicateFilter::default(),
    );
    let alignment = extract_alignment(&outcome.triples, &[OWL_SAME_AS], &kg, &target, &DisambiguationFilter::default());
    println!("alignment: {} pairs, {:?}", alignment.len(), alignment.stats);

    let mut bytes = Vec::new();
    write_kg(&mut bytes, &kg)?;
    let back = read_kg(&mut bytes.as_slice())?;
    println!("snapshot: {} bytes, round trip equal: {}", bytes.len(), back.triples().eq(kg.triples()));
    Ok(())
}
