//! Synthetic twin knowledge graphs.
//!
//! A base graph of typed entities is generated once and copied into two
//! disjoint IRI namespaces. Each copy independently drops relation edges at
//! the noise rate, and the target copy numbers its entities in a shuffled
//! order. Entities share names in collision groups whose sizes follow a
//! power law, which is what makes the matching task ambiguous. The identity
//! correspondence is emitted as `owl:sameAs` triples.
//!
//! Edges prefer entities of the same or the next type, so entity embeddings
//! carry type information that is learnable across the two graphs.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rdf::{Literal, Triple, FOAF_NAME, OWL_SAME_AS, RDFS_LABEL, RDF_TYPE};
use crate::seed;

pub const SOURCE_RESOURCE: &str = "http://source.example.org/resource/";
pub const SOURCE_ONTOLOGY: &str = "http://source.example.org/ontology/";
pub const TARGET_ENTITY: &str = "http://target.example.org/entity/";
pub const TARGET_ONTOLOGY: &str = "http://target.example.org/ontology/";

const CLASS_NAMES: [&str; 12] = [
    "Person",
    "Album",
    "Film",
    "Place",
    "Organisation",
    "MusicalWork",
    "Species",
    "Building",
    "Event",
    "Book",
    "Ship",
    "Company",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub entities: usize,
    /// Mean number of relation edges per entity (Poisson).
    pub mean_out_degree: f64,
    pub predicates: usize,
    /// Number of latent entity classes.
    pub types: usize,
    /// Probability that an edge stays within the type's affinity set.
    pub type_affinity: f64,
    /// Share of entities that belong to a name-collision group.
    pub ambiguous_fraction: f64,
    /// The share of colliding entities in groups of size `s` is
    /// proportional to `s^-zipf_exponent`.
    pub zipf_exponent: f64,
    pub min_group: usize,
    pub max_group: usize,
    /// Per-copy probability of dropping each relation edge.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            entities: 500,
            mean_out_degree: 6.0,
            predicates: 16,
            types: 8,
            type_affinity: 0.8,
            ambiguous_fraction: 0.5,
            zipf_exponent: 1.0,
            min_group: 2,
            max_group: 16,
            noise: 0.1,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.entities == 0 || self.predicates == 0 || self.types == 0 {
            return fail("entities, predicates and types must be at least 1".into());
        }
        if self.min_group == 0 || self.max_group == 0 {
            return fail("group sizes must be at least 1".into());
        }
        if !(self.mean_out_degree >= 0.0 && self.mean_out_degree.is_finite()) {
            return fail(format!("mean out-degree {} must be non-negative", self.mean_out_degree));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return fail(format!("noise rate {} must be in [0, 1)", self.noise));
        }
        for (name, v) in [("type affinity", self.type_affinity), ("ambiguous fraction", self.ambiguous_fraction)] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} {v} must be in [0, 1]"));
            }
        }
        if !self.zipf_exponent.is_finite() {
            return fail("Zipf exponent must be finite".into());
        }
        Ok(())
    }
}

/// Group sizes for the colliding entities, largest groups last.
///
/// Each size `s` in `[min_group, max_group]` (`min_group` raised to 2) gets
/// `floor(w_s * budget / s)` groups with `w_s ∝ s^-α`, capped so the number
/// of entities per size never increases with `s`.
pub fn collision_groups(spec: &SyntheticSpec) -> Vec<usize> {
    let lo = spec.min_group.max(2);
    if spec.max_group < lo {
        return Vec::new();
    }
    let budget = (spec.ambiguous_fraction * spec.entities as f64).floor();
    let weights: Vec<f64> = (lo..=spec.max_group).map(|s| (s as f64).powf(-spec.zipf_exponent)).collect();
    let total: f64 = weights.iter().sum();
    let mut sizes = Vec::new();
    let mut previous = usize::MAX;
    for (s, w) in (lo..=spec.max_group).zip(weights) {
        let groups = ((budget * w / total / s as f64).floor() as usize).min(previous / s);
        previous = groups * s;
        sizes.extend(std::iter::repeat_n(s, groups));
    }
    sizes
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwinGraphs {
    pub source: Vec<Triple>,
    pub target: Vec<Triple>,
    /// `source owl:sameAs target`, one per entity.
    pub alignment: Vec<Triple>,
    /// Latent class of each base entity.
    pub entity_types: Vec<usize>,
    /// Base entity index → target numbering.
    pub target_index: Vec<usize>,
}

pub fn source_iri(i: usize) -> String {
    format!("{SOURCE_RESOURCE}E{i}")
}

pub fn target_iri(j: usize) -> String {
    format!("{TARGET_ENTITY}Q{j}")
}

pub fn class_name(t: usize) -> String {
    CLASS_NAMES.get(t).map_or_else(|| format!("Class{t}"), |s| s.to_string())
}

fn random_word(rng: &mut ChaCha8Rng) -> String {
    const ONSETS: [&str; 16] = ["b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "ch"];
    const VOWELS: [&str; 6] = ["a", "e", "i", "o", "u", "ei"];
    let syllables = rng.random_range(2..=3);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
        w.push_str(VOWELS[rng.random_range(0..VOWELS.len())]);
    }
    let mut chars = w.chars();
    let first = chars.next().unwrap().to_ascii_uppercase();
    std::iter::once(first).chain(chars).collect()
}

fn unique_names(n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut seen = HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let name = format!("{} {}", random_word(rng), random_word(rng));
        if seen.insert(name.clone()) {
            out.push(name);
        }
    }
    out
}

/// Predicates used by entities of type `t`: a window of three starting at
/// a type-specific offset.
fn type_predicates(t: usize, types: usize, predicates: usize) -> Vec<usize> {
    let per = predicates.min(3);
    let start = t * predicates / types;
    (0..per).map(|j| (start + j) % predicates).collect()
}

pub fn generate(spec: &SyntheticSpec) -> Result<TwinGraphs> {
    spec.validate()?;
    let n = spec.entities;
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(spec.seed, "synth/base"));

    let entity_types: Vec<usize> = (0..n).map(|_| rng.random_range(0..spec.types)).collect();
    let mut by_type = vec![Vec::new(); spec.types];
    for (i, &t) in entity_types.iter().enumerate() {
        by_type[t].push(i);
    }

    // Base relation edges (subject, predicate, object).
    let degree = if spec.mean_out_degree > 0.0 {
        Some(Poisson::new(spec.mean_out_degree).map_err(|e| Error::Config(e.to_string()))?)
    } else {
        None
    };
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for (s, &t) in entity_types.iter().enumerate() {
        let k = degree.as_ref().map_or(0, |d| d.sample(&mut rng) as usize);
        let preds = type_predicates(t, spec.types, spec.predicates);
        let mut seen = HashSet::new();
        for _ in 0..k {
            let pool = if rng.random_bool(spec.type_affinity) {
                let tt = if rng.random_bool(0.5) { t } else { (t + 1) % spec.types };
                &by_type[tt]
            } else {
                &by_type[entity_types[rng.random_range(0..n)]]
            };
            if pool.is_empty() {
                continue;
            }
            let o = pool[rng.random_range(0..pool.len())];
            let p = preds[rng.random_range(0..preds.len())];
            if o != s && seen.insert((p, o)) {
                edges.push((s, p, o));
            }
        }
    }

    // Names: collision groups over a random subset, unique names elsewhere.
    let groups = collision_groups(spec);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let grouped: usize = groups.iter().sum();
    let pool = unique_names(groups.len() + (n - grouped), &mut rng);
    let mut names = vec![String::new(); n];
    let mut at = 0;
    for (g, &size) in groups.iter().enumerate() {
        for &e in &order[at..at + size] {
            names[e] = pool[g].clone();
        }
        at += size;
    }
    for (k, &e) in order[at..].iter().enumerate() {
        names[e] = pool[groups.len() + k].clone();
    }

    let mut target_index: Vec<usize> = (0..n).collect();
    target_index.shuffle(&mut rng);

    let copy = |label: &str, iri: &dyn Fn(usize) -> String, ontology: &str, name_predicate: &str, lang: Option<&str>| {
        let mut r = ChaCha8Rng::seed_from_u64(seed::derive(spec.seed, label));
        let kept: Vec<bool> = edges.iter().map(|_| !r.random_bool(spec.noise)).collect();
        let mut per_entity: Vec<Vec<Triple>> = vec![Vec::new(); n];
        for (i, t) in entity_types.iter().enumerate() {
            per_entity[i].push(Triple::resource(iri(i), RDF_TYPE, format!("{ontology}{}", class_name(*t))));
            let lit = match lang {
                Some(l) => Literal::tagged(names[i].as_str(), l),
                None => Literal::plain(names[i].as_str()),
            };
            per_entity[i].push(Triple::literal(iri(i), name_predicate, lit));
        }
        for (&(s, p, o), keep) in edges.iter().zip(kept) {
            if keep {
                per_entity[s].push(Triple::resource(iri(s), format!("{ontology}p{p}"), iri(o)));
            }
        }
        per_entity
    };

    let src_iri = |i: usize| source_iri(i);
    let tgt_iri = |i: usize| target_iri(target_index[i]);
    let source_entities = copy("synth/source", &src_iri, SOURCE_ONTOLOGY, FOAF_NAME, None);
    let target_entities = copy("synth/target", &tgt_iri, TARGET_ONTOLOGY, RDFS_LABEL, Some("en"));

    let source: Vec<Triple> = source_entities.into_iter().flatten().collect();
    // Target triples in target numbering order, so that file order carries
    // no information about the source order.
    let mut by_target: Vec<(usize, Vec<Triple>)> =
        target_entities.into_iter().enumerate().map(|(i, ts)| (target_index[i], ts)).collect();
    by_target.sort_by_key(|(j, _)| *j);
    let target: Vec<Triple> = by_target.into_iter().flat_map(|(_, ts)| ts).collect();
    let alignment = (0..n).map(|i| Triple::resource(source_iri(i), OWL_SAME_AS, target_iri(target_index[i]))).collect();

    Ok(TwinGraphs { source, target, alignment, entity_types, target_index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Object;
    use std::collections::BTreeMap;

    fn small() -> SyntheticSpec {
        SyntheticSpec { entities: 300, seed: 5, ..Default::default() }
    }

    #[test]
    fn groups_follow_power_law() {
        let spec = SyntheticSpec { entities: 5000, ambiguous_fraction: 1.0, ..Default::default() };
        let groups = collision_groups(&spec);
        let mut per_size: BTreeMap<usize, usize> = BTreeMap::new();
        for &g in &groups {
            *per_size.entry(g).or_default() += g;
        }
        let counts: Vec<usize> = per_size.values().copied().collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
        assert!(groups.iter().sum::<usize>() <= 5000);
        assert_eq!(*per_size.keys().next().unwrap(), 2);
        assert_eq!(*per_size.keys().last().unwrap(), 16);
    }

    #[test]
    fn no_groups_when_max_is_one() {
        assert!(collision_groups(&SyntheticSpec { max_group: 1, ..Default::default() }).is_empty());
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate(&small()).unwrap(), generate(&small()).unwrap());
        assert_ne!(generate(&small()).unwrap().source, generate(&SyntheticSpec { seed: 6, ..small() }).unwrap().source);
    }

    #[test]
    fn namespaces_are_disjoint() {
        let g = generate(&small()).unwrap();
        assert!(g.source.iter().all(|t| t.subject.starts_with(SOURCE_RESOURCE)));
        assert!(g.target.iter().all(|t| t.subject.starts_with(TARGET_ENTITY)));
        assert_eq!(g.alignment.len(), 300);
    }

    #[test]
    fn zero_noise_copies_are_isomorphic() {
        let spec = SyntheticSpec { noise: 0.0, ..small() };
        let g = generate(&spec).unwrap();
        let to_source: BTreeMap<String, String> = (0..spec.entities).map(|i| (target_iri(g.target_index[i]), source_iri(i))).collect();
        let rel = |ts: &[Triple], map: &dyn Fn(&str) -> String| -> Vec<(String, String, String)> {
            let mut v: Vec<_> = ts
                .iter()
                .filter_map(|t| match &t.object {
                    Object::Resource(o) if t.predicate != RDF_TYPE => {
                        Some((map(&t.subject), crate::typemap::local_name(&t.predicate).to_string(), map(o)))
                    }
                    _ => None,
                })
                .collect();
            v.sort();
            v
        };
        let a = rel(&g.source, &|s| s.to_string());
        let b = rel(&g.target, &|s| to_source[s].clone());
        assert!(!a.is_empty());
        assert_eq!(a, b);
    }

    #[test]
    fn noise_drops_edges() {
        let g = generate(&SyntheticSpec { noise: 0.5, ..small() }).unwrap();
        let g0 = generate(&SyntheticSpec { noise: 0.0, ..small() }).unwrap();
        assert!(g.source.len() < g0.source.len());
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(generate(&SyntheticSpec { noise: 1.0, ..small() }).is_err());
        assert!(generate(&SyntheticSpec { entities: 0, ..small() }).is_err());
    }
}
