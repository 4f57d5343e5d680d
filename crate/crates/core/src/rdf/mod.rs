//! N-Triples ingestion into an interned in-memory knowledge graph.

mod extract;
mod graph;
mod ntriples;
mod snapshot;

pub use extract::{
    extract_alignment, extract_names, extract_names_with_languages, AlignmentSet, AlignmentStats,
    DisambiguationFilter, NameMap,
};
pub use graph::{build_graph, Edge, EntityId, GraphBuilder, Kg, PredicateFilter, PredicateId};
pub use ntriples::{
    open_ntriples, parse_line, parse_ntriples, write_ntriples, Literal, MalformedLine,
    NTriplesReader, Object, ParseOutcome, Triple,
};
pub use snapshot::{read_kg, read_kg_file, write_kg, write_kg_file};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const FOAF_NAME: &str = "http://xmlns.com/foaf/0.1/name";
pub const OWL_SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
