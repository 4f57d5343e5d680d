use std::collections::HashSet;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use super::ntriples::{Literal, Object, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PredicateId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PredicateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Outgoing edge to an IRI (or blank node) object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub predicate: PredicateId,
    pub object: EntityId,
}

/// Which predicates make it into the graph. `keep` (when set) is applied
/// before `drop`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PredicateFilter {
    #[serde(default)]
    pub keep: Option<HashSet<String>>,
    #[serde(default)]
    pub drop: HashSet<String>,
}

impl PredicateFilter {
    pub fn admits(&self, predicate: &str) -> bool {
        if let Some(keep) = &self.keep {
            if !keep.contains(predicate) {
                return false;
            }
        }
        !self.drop.contains(predicate)
    }
}

/// Immutable directed labeled multigraph.
///
/// Entity and predicate IRIs are interned to dense ids in first-seen order.
/// Resource-valued triples live in a CSR adjacency; literal-valued triples in
/// a parallel CSR side store, so literals never become nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Kg {
    pub(crate) entities: IndexSet<String>,
    pub(crate) predicates: IndexSet<String>,
    pub(crate) edge_offsets: Vec<usize>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) literal_offsets: Vec<usize>,
    pub(crate) literals: Vec<(PredicateId, Literal)>,
}

impl Kg {
    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn predicate_count(&self) -> usize {
        self.predicates.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn literal_count(&self) -> usize {
        self.literals.len()
    }

    pub fn triple_count(&self) -> usize {
        self.edges.len() + self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    pub fn entity_id(&self, iri: &str) -> Option<EntityId> {
        self.entities.get_index_of(iri).map(|i| EntityId(i as u32))
    }

    pub fn entity_iri(&self, id: EntityId) -> &str {
        &self.entities[id.index()]
    }

    pub fn predicate_id(&self, iri: &str) -> Option<PredicateId> {
        self.predicates.get_index_of(iri).map(|i| PredicateId(i as u32))
    }

    pub fn predicate_iri(&self, id: PredicateId) -> &str {
        &self.predicates[id.index()]
    }

    pub fn entity_ids(&self) -> impl ExactSizeIterator<Item = EntityId> {
        (0..self.entities.len() as u32).map(EntityId)
    }

    pub fn out_edges(&self, id: EntityId) -> &[Edge] {
        let i = id.index();
        &self.edges[self.edge_offsets[i]..self.edge_offsets[i + 1]]
    }

    pub fn literals(&self, id: EntityId) -> &[(PredicateId, Literal)] {
        let i = id.index();
        &self.literals[self.literal_offsets[i]..self.literal_offsets[i + 1]]
    }

    pub fn has_edge(&self, s: EntityId, p: PredicateId, o: EntityId) -> bool {
        self.out_edges(s).contains(&Edge { predicate: p, object: o })
    }

    /// All stored triples, grouped by subject in id order.
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.entity_ids().flat_map(move |s| {
            let subj = self.entity_iri(s);
            let edges = self.out_edges(s).iter().map(move |e| {
                Triple::resource(subj, self.predicate_iri(e.predicate), self.entity_iri(e.object))
            });
            let lits = self
                .literals(s)
                .iter()
                .map(move |(p, l)| Triple::literal(subj, self.predicate_iri(*p), l.clone()));
            edges.chain(lits)
        })
    }
}

/// Accumulates triples, then freezes them into a [`Kg`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    filter: PredicateFilter,
    entities: IndexSet<String>,
    predicates: IndexSet<String>,
    adjacency: Vec<Vec<Edge>>,
    literals: Vec<Vec<(PredicateId, Literal)>>,
}

impl GraphBuilder {
    pub fn new(filter: PredicateFilter) -> Self {
        GraphBuilder { filter, ..Default::default() }
    }

    fn intern_entity(&mut self, iri: &str) -> EntityId {
        if let Some(i) = self.entities.get_index_of(iri) {
            return EntityId(i as u32);
        }
        let (i, _) = self.entities.insert_full(iri.to_string());
        self.adjacency.push(Vec::new());
        self.literals.push(Vec::new());
        EntityId(i as u32)
    }

    fn intern_predicate(&mut self, iri: &str) -> PredicateId {
        if let Some(i) = self.predicates.get_index_of(iri) {
            return PredicateId(i as u32);
        }
        PredicateId(self.predicates.insert_full(iri.to_string()).0 as u32)
    }

    /// Returns false when the predicate filter rejected the triple.
    pub fn add(&mut self, triple: &Triple) -> bool {
        if !self.filter.admits(&triple.predicate) {
            return false;
        }
        let s = self.intern_entity(&triple.subject);
        let p = self.intern_predicate(&triple.predicate);
        match &triple.object {
            Object::Resource(o) => {
                let o = self.intern_entity(o);
                self.adjacency[s.index()].push(Edge { predicate: p, object: o });
            }
            Object::Literal(l) => self.literals[s.index()].push((p, l.clone())),
        }
        true
    }

    pub fn build(self) -> Kg {
        let (edge_offsets, edges) = flatten(self.adjacency);
        let (literal_offsets, literals) = flatten(self.literals);
        Kg { entities: self.entities, predicates: self.predicates, edge_offsets, edges, literal_offsets, literals }
    }
}

fn flatten<T>(lists: Vec<Vec<T>>) -> (Vec<usize>, Vec<T>) {
    let mut offsets = Vec::with_capacity(lists.len() + 1);
    let mut flat = Vec::with_capacity(lists.iter().map(Vec::len).sum());
    offsets.push(0);
    for list in lists {
        flat.extend(list);
        offsets.push(flat.len());
    }
    (offsets, flat)
}

pub fn build_graph<'a>(triples: impl IntoIterator<Item = &'a Triple>, filter: &PredicateFilter) -> Kg {
    let mut builder = GraphBuilder::new(filter.clone());
    for t in triples {
        builder.add(t);
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Vec<Triple> {
        vec![
            Triple::resource("http://a", "http://p", "http://b"),
            Triple::resource("http://b", "http://q", "http://c"),
            Triple::resource("http://a", "http://q", "http://c"),
        ]
    }

    #[test]
    fn three_triples() {
        let kg = build_graph(&abc(), &PredicateFilter::default());
        assert_eq!(kg.entity_count(), 3);
        assert_eq!(kg.edge_count(), 3);
        let a = kg.entity_id("http://a").unwrap();
        let b = kg.entity_id("http://b").unwrap();
        let c = kg.entity_id("http://c").unwrap();
        assert_eq!((a, b, c), (EntityId(0), EntityId(1), EntityId(2)));
        assert_eq!(kg.out_edges(a).len(), 2);
        assert_eq!(kg.out_edges(b).len(), 1);
        assert!(kg.out_edges(c).is_empty());
    }

    #[test]
    fn empty_input() {
        let kg = build_graph(&[], &PredicateFilter::default());
        assert_eq!((kg.entity_count(), kg.triple_count()), (0, 0));
        assert!(kg.is_empty());
    }

    #[test]
    fn duplicates_are_kept() {
        let t = Triple::resource("http://a", "http://p", "http://b");
        let kg = build_graph(&[t.clone(), t], &PredicateFilter::default());
        assert_eq!(kg.edge_count(), 2);
        assert_eq!(kg.out_edges(EntityId(0)).len(), 2);
    }

    #[test]
    fn literals_are_not_nodes() {
        let ts = vec![Triple::literal("http://a", "http://name", Literal::plain("A"))];
        let kg = build_graph(&ts, &PredicateFilter::default());
        assert_eq!(kg.entity_count(), 1);
        assert_eq!(kg.literals(EntityId(0)).len(), 1);
        assert_eq!(kg.edge_count(), 0);
    }

    #[test]
    fn filter_keep_then_drop() {
        let mut filter = PredicateFilter::default();
        filter.drop.insert("http://q".into());
        let kg = build_graph(&abc(), &filter);
        assert_eq!(kg.edge_count(), 1);
        assert_eq!(kg.predicate_count(), 1);

        let filter = PredicateFilter { keep: Some(["http://q".to_string()].into()), drop: HashSet::new() };
        let kg = build_graph(&abc(), &filter);
        assert_eq!(kg.edge_count(), 2);
        // "a" is first seen as the subject of a kept triple only at line 3.
        assert_eq!(kg.entity_iri(EntityId(0)), "http://b");
    }

    #[test]
    fn interning_is_bijective() {
        let kg = build_graph(&abc(), &PredicateFilter::default());
        for id in kg.entity_ids() {
            assert_eq!(kg.entity_id(kg.entity_iri(id)), Some(id));
        }
    }
}
