//! Entity type labels used by the per-type breakdowns.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::rdf::Kg;

/// Entity IRI → type labels. Multi-valued; labels are non-empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypeMap {
    labels: BTreeMap<String, BTreeSet<String>>,
}

/// Local name of an IRI: the part after the last `#` or `/`.
pub fn local_name(iri: &str) -> &str {
    let cut = iri.rfind(['#', '/']).map_or(0, |i| i + 1);
    if cut < iri.len() {
        &iri[cut..]
    } else {
        iri
    }
}

impl TypeMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Labels from `type_predicate` edges, using the class IRI's local name
    /// so that classes from different graphs can be compared.
    pub fn from_kg(kg: &Kg, type_predicate: &str) -> Self {
        let mut map = TypeMap::new();
        let Some(pid) = kg.predicate_id(type_predicate) else {
            return map;
        };
        for e in kg.entity_ids() {
            for edge in kg.out_edges(e).iter().filter(|edge| edge.predicate == pid) {
                map.insert(kg.entity_iri(e), local_name(kg.entity_iri(edge.object)));
            }
        }
        map
    }

    pub fn insert(&mut self, iri: &str, label: &str) {
        if !label.is_empty() {
            self.labels.entry(iri.to_string()).or_default().insert(label.to_string());
        }
    }

    pub fn merge(&mut self, other: TypeMap) {
        for (iri, labels) in other.labels {
            self.labels.entry(iri).or_default().extend(labels);
        }
    }

    pub fn labels(&self, iri: &str) -> Option<&BTreeSet<String>> {
        self.labels.get(iri)
    }

    pub fn share_type(&self, a: &str, b: &str) -> bool {
        match (self.labels.get(a), self.labels.get(b)) {
            (Some(x), Some(y)) => !x.is_disjoint(y),
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `iri \t label` lines; repeated IRIs accumulate labels.
    pub fn read_tsv<R: BufRead>(r: R) -> Result<Self> {
        let mut map = TypeMap::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (iri, label) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(format!("type map line {}", i + 1), "expected `iri<TAB>label`"))?;
            if label.is_empty() {
                return Err(Error::format(format!("type map line {}", i + 1), "empty label"));
            }
            map.insert(iri, label);
        }
        Ok(map)
    }

    pub fn write_tsv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (iri, labels) in &self.labels {
            for l in labels {
                writeln!(w, "{iri}\t{l}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{build_graph, PredicateFilter, Triple, RDF_TYPE};

    #[test]
    fn local_names() {
        assert_eq!(local_name("http://dbpedia.org/ontology/Album"), "Album");
        assert_eq!(local_name("http://x.org/onto#Person"), "Person");
        assert_eq!(local_name("plain"), "plain");
        assert_eq!(local_name("http://x/"), "http://x/");
    }

    #[test]
    fn from_graph_and_overlap() {
        let kg = build_graph(
            &[
                Triple::resource("http://a", RDF_TYPE, "http://src/onto/Album"),
                Triple::resource("http://a", RDF_TYPE, "http://src/onto/MusicalWork"),
                Triple::resource("http://b", RDF_TYPE, "http://tgt/onto/Album"),
                Triple::resource("http://c", "http://p", "http://b"),
            ],
            &PredicateFilter::default(),
        );
        let tm = TypeMap::from_kg(&kg, RDF_TYPE);
        assert_eq!(tm.len(), 2);
        assert!(tm.share_type("http://a", "http://b"));
        assert!(!tm.share_type("http://a", "http://c"));
    }

    #[test]
    fn tsv_round_trip() {
        let text = "http://a\tX\nhttp://a\tY\nhttp://b\tX\n";
        let tm = TypeMap::read_tsv(text.as_bytes()).unwrap();
        let mut out = Vec::new();
        tm.write_tsv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
        assert!(TypeMap::read_tsv("no-tab\n".as_bytes()).is_err());
    }
}
