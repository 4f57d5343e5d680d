use std::collections::{BTreeMap, HashMap};

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use super::graph::{EntityId, Kg};
use super::ntriples::{Object, Triple};
use super::RDF_TYPE;

/// Entity → name literals, in triple order.
pub type NameMap = BTreeMap<EntityId, Vec<String>>;

/// Literal values of the given predicates, per entity. Entities without any
/// name are omitted; resource-valued name triples are ignored.
pub fn extract_names(kg: &Kg, predicates: &[&str]) -> NameMap {
    extract_names_with_languages(kg, predicates, &[])
}

/// Like [`extract_names`], keeping only literals whose language tag is in
/// `languages` (untagged literals always pass). An empty list keeps all.
pub fn extract_names_with_languages(kg: &Kg, predicates: &[&str], languages: &[&str]) -> NameMap {
    let pids: Vec<_> = predicates.iter().filter_map(|p| kg.predicate_id(p)).collect();
    let mut names = NameMap::new();
    if pids.is_empty() {
        return names;
    }
    for e in kg.entity_ids() {
        let found: Vec<String> = kg
            .literals(e)
            .iter()
            .filter(|(p, lit)| {
                pids.contains(p)
                    && (languages.is_empty()
                        || lit.language.as_deref().is_none_or(|l| languages.iter().any(|x| x.eq_ignore_ascii_case(l))))
            })
            .map(|(_, lit)| lit.lexical.clone())
            .collect();
        if !found.is_empty() {
            names.insert(e, found);
        }
    }
    names
}

/// Decides whether an entity is a disambiguation page.
///
/// An entity is flagged when any of these hold: it has a `type_predicate`
/// edge to one of `classes`; it has an outgoing edge with one of
/// `marker_predicates`; its IRI contains one of `iri_substrings`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DisambiguationFilter {
    pub type_predicate: String,
    pub classes: Vec<String>,
    pub marker_predicates: Vec<String>,
    pub iri_substrings: Vec<String>,
}

impl Default for DisambiguationFilter {
    fn default() -> Self {
        DisambiguationFilter {
            type_predicate: RDF_TYPE.to_string(),
            // Wikidata: "Wikimedia disambiguation page".
            classes: vec!["http://www.wikidata.org/entity/Q4167410".to_string()],
            marker_predicates: vec!["http://dbpedia.org/ontology/wikiPageDisambiguates".to_string()],
            iri_substrings: vec!["(disambiguation)".to_string()],
        }
    }
}

impl DisambiguationFilter {
    /// A filter that flags nothing.
    pub fn none() -> Self {
        DisambiguationFilter {
            type_predicate: RDF_TYPE.to_string(),
            classes: Vec::new(),
            marker_predicates: Vec::new(),
            iri_substrings: Vec::new(),
        }
    }

    pub fn is_disambiguation(&self, kg: &Kg, entity: EntityId) -> bool {
        let iri = kg.entity_iri(entity);
        if self.iri_substrings.iter().any(|s| iri.contains(s.as_str())) {
            return true;
        }
        let type_pid = kg.predicate_id(&self.type_predicate);
        kg.out_edges(entity).iter().any(|edge| {
            (Some(edge.predicate) == type_pid
                && self.classes.iter().any(|c| c == kg.entity_iri(edge.object)))
                || self.marker_predicates.iter().any(|m| m == kg.predicate_iri(edge.predicate))
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentStats {
    /// Alignment-predicate triples seen.
    pub seen: usize,
    /// Dropped because an endpoint is missing from its graph (or is a literal).
    pub missing: usize,
    pub disambiguation: usize,
    /// Source already mapped to a different target; later mapping dropped.
    pub conflicts: usize,
    /// Exact repeats of an accepted pair.
    pub duplicates: usize,
}

/// Source → target entity pairs, each source at most once, in the order
/// they were accepted.
#[derive(Debug, Clone, Default)]
pub struct AlignmentSet {
    pairs: Vec<(EntityId, EntityId)>,
    by_source: HashMap<EntityId, EntityId>,
    pub stats: AlignmentStats,
}

impl AlignmentSet {
    pub fn pairs(&self) -> &[(EntityId, EntityId)] {
        &self.pairs
    }

    pub fn target_of(&self, source: EntityId) -> Option<EntityId> {
        self.by_source.get(&source).copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Adds a pair unless the source is already mapped. Returns whether it was added.
    pub fn insert(&mut self, source: EntityId, target: EntityId) -> bool {
        match self.by_source.get(&source) {
            Some(&t) if t == target => {
                self.stats.duplicates += 1;
                false
            }
            Some(&t) => {
                self.stats.conflicts += 1;
                warn!("source entity {} already aligned to {}; ignoring {}", source.0, t.0, target.0);
                false
            }
            None => {
                self.by_source.insert(source, target);
                self.pairs.push((source, target));
                true
            }
        }
    }
}

/// Builds the source → target alignment from `owl:sameAs`-style triples.
///
/// A triple may point either way: `source sameAs target` or
/// `target sameAs source`. Pairs are kept only when both endpoints exist in
/// their graphs and neither is a disambiguation page. When a source maps to
/// several targets, the first one wins and the conflict is logged.
pub fn extract_alignment<'a>(
    triples: impl IntoIterator<Item = &'a Triple>,
    alignment_predicates: &[&str],
    source: &Kg,
    target: &Kg,
    filter: &DisambiguationFilter,
) -> AlignmentSet {
    let mut set = AlignmentSet::default();
    for t in triples {
        if !alignment_predicates.contains(&t.predicate.as_str()) {
            continue;
        }
        set.stats.seen += 1;
        let Object::Resource(obj) = &t.object else {
            set.stats.missing += 1;
            continue;
        };
        let pair = match (source.entity_id(&t.subject), target.entity_id(obj)) {
            (Some(s), Some(o)) => Some((s, o)),
            _ => match (source.entity_id(obj), target.entity_id(&t.subject)) {
                (Some(s), Some(o)) => Some((s, o)),
                _ => None,
            },
        };
        let Some((s, o)) = pair else {
            set.stats.missing += 1;
            continue;
        };
        if filter.is_disambiguation(source, s) || filter.is_disambiguation(target, o) {
            set.stats.disambiguation += 1;
            debug!("dropping disambiguation mapping {} -> {}", source.entity_iri(s), target.entity_iri(o));
            continue;
        }
        set.insert(s, o);
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{build_graph, Literal, PredicateFilter, FOAF_NAME, OWL_SAME_AS, RDFS_LABEL};

    fn kg(ts: &[Triple]) -> Kg {
        build_graph(ts, &PredicateFilter::default())
    }

    #[test]
    fn names_from_literals() {
        let g = kg(&[Triple::literal("http://db/Adam_Smith", FOAF_NAME, Literal::tagged("Adam Smith", "en"))]);
        let names = extract_names(&g, &[FOAF_NAME]);
        assert_eq!(names.len(), 1);
        assert_eq!(names[&EntityId(0)], vec!["Adam Smith".to_string()]);
    }

    #[test]
    fn two_names_keep_order() {
        let g = kg(&[
            Triple::literal("http://e", FOAF_NAME, Literal::plain("Second")),
            Triple::literal("http://e", RDFS_LABEL, Literal::plain("First")),
            Triple::literal("http://e", FOAF_NAME, Literal::plain("Third")),
        ]);
        assert_eq!(extract_names(&g, &[FOAF_NAME])[&EntityId(0)], vec!["Second", "Third"]);
        assert_eq!(extract_names(&g, &[FOAF_NAME, RDFS_LABEL])[&EntityId(0)], vec!["Second", "First", "Third"]);
    }

    #[test]
    fn resource_valued_name_is_ignored() {
        let g = kg(&[Triple::resource("http://e", FOAF_NAME, "http://not-a-name")]);
        assert!(extract_names(&g, &[FOAF_NAME]).is_empty());
    }

    #[test]
    fn language_filter() {
        let g = kg(&[
            Triple::literal("http://e", RDFS_LABEL, Literal::tagged("Londres", "fr")),
            Triple::literal("http://e", RDFS_LABEL, Literal::tagged("London", "en")),
            Triple::literal("http://e", RDFS_LABEL, Literal::plain("LDN")),
        ]);
        let names = extract_names_with_languages(&g, &[RDFS_LABEL], &["en"]);
        assert_eq!(names[&EntityId(0)], vec!["London", "LDN"]);
    }

    fn graphs() -> (Kg, Kg) {
        let src = kg(&[Triple::literal("http://db/a", FOAF_NAME, Literal::plain("A"))]);
        let tgt = kg(&[
            Triple::literal("http://wd/x", RDFS_LABEL, Literal::plain("A")),
            Triple::literal("http://wd/y", RDFS_LABEL, Literal::plain("A")),
            Triple::resource("http://wd/d", RDF_TYPE, "http://www.wikidata.org/entity/Q4167410"),
        ]);
        (src, tgt)
    }

    #[test]
    fn simple_alignment() {
        let (src, tgt) = graphs();
        let same = [Triple::resource("http://db/a", OWL_SAME_AS, "http://wd/x")];
        let set = extract_alignment(&same, &[OWL_SAME_AS], &src, &tgt, &DisambiguationFilter::default());
        assert_eq!(set.pairs(), &[(EntityId(0), EntityId(0))]);
    }

    #[test]
    fn reversed_triples_are_accepted() {
        let (src, tgt) = graphs();
        let same = [Triple::resource("http://wd/y", OWL_SAME_AS, "http://db/a")];
        let set = extract_alignment(&same, &[OWL_SAME_AS], &src, &tgt, &DisambiguationFilter::default());
        assert_eq!(set.pairs(), &[(EntityId(0), EntityId(1))]);
    }

    #[test]
    fn disambiguation_targets_are_removed() {
        let (src, tgt) = graphs();
        let same = [Triple::resource("http://db/a", OWL_SAME_AS, "http://wd/d")];
        let set = extract_alignment(&same, &[OWL_SAME_AS], &src, &tgt, &DisambiguationFilter::default());
        assert!(set.is_empty());
        assert_eq!(set.stats.disambiguation, 1);

        let src = kg(&[Triple::literal("http://db/John_Burt_(disambiguation)", FOAF_NAME, Literal::plain("J"))]);
        let same = [Triple::resource("http://db/John_Burt_(disambiguation)", OWL_SAME_AS, "http://wd/x")];
        let set = extract_alignment(&same, &[OWL_SAME_AS], &src, &tgt, &DisambiguationFilter::default());
        assert!(set.is_empty());
    }

    #[test]
    fn first_mapping_wins() {
        let (src, tgt) = graphs();
        let same = [
            Triple::resource("http://db/a", OWL_SAME_AS, "http://wd/x"),
            Triple::resource("http://db/a", OWL_SAME_AS, "http://wd/y"),
            Triple::resource("http://db/a", OWL_SAME_AS, "http://wd/x"),
        ];
        let set = extract_alignment(&same, &[OWL_SAME_AS], &src, &tgt, &DisambiguationFilter::default());
        assert_eq!(set.pairs(), &[(EntityId(0), EntityId(0))]);
        assert_eq!((set.stats.conflicts, set.stats.duplicates), (1, 1));
    }

    #[test]
    fn missing_endpoints_dropped() {
        let (src, tgt) = graphs();
        let same = [Triple::resource("http://db/a", OWL_SAME_AS, "http://wd/unknown")];
        let set = extract_alignment(&same, &[OWL_SAME_AS], &src, &tgt, &DisambiguationFilter::default());
        assert!(set.is_empty());
        assert_eq!(set.stats.missing, 1);
    }
}
