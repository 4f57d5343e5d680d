//! Inverted index from normalized entity names to entity ids.
//!
//! Two on-disk forms: a versioned binary snapshot (magic `KGMNAMES`) and a
//! TSV dump, one `name \t id,id,...` line per key in name order.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::binio::*;
use crate::error::{Error, Result};
use crate::rdf::{EntityId, NameMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationPolicy {
    /// NFC, trimmed, internal whitespace runs collapsed; case preserved.
    #[default]
    Exact,
    /// As `Exact`, then lowercased.
    Casefold,
}

impl NormalizationPolicy {
    fn tag(self) -> u8 {
        match self {
            NormalizationPolicy::Exact => 0,
            NormalizationPolicy::Casefold => 1,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(NormalizationPolicy::Exact),
            1 => Some(NormalizationPolicy::Casefold),
            _ => None,
        }
    }
}

pub fn normalize_name(raw: &str, policy: NormalizationPolicy) -> String {
    let nfc: String = raw.nfc().collect();
    let mut out = String::with_capacity(nfc.len());
    for (i, word) in nfc.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(word);
    }
    match policy {
        NormalizationPolicy::Exact => out,
        NormalizationPolicy::Casefold => out.to_lowercase(),
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NameIndex {
    policy: NormalizationPolicy,
    postings: HashMap<String, Vec<EntityId>>,
}

impl NameIndex {
    pub fn build(names: &NameMap, policy: NormalizationPolicy) -> Self {
        let mut postings: HashMap<String, Vec<EntityId>> = HashMap::new();
        // NameMap iterates in ascending id order, so each posting list is
        // built sorted; only same-entity repeats need removing.
        for (&entity, list) in names {
            for raw in list {
                let key = normalize_name(raw, policy);
                let posting = postings.entry(key).or_default();
                if posting.last() != Some(&entity) {
                    posting.push(entity);
                }
            }
        }
        NameIndex { policy, postings }
    }

    pub fn policy(&self) -> NormalizationPolicy {
        self.policy
    }

    pub fn lookup(&self, name: &str) -> &[EntityId] {
        self.postings.get(&normalize_name(name, self.policy)).map_or(&[], Vec::as_slice)
    }

    /// Lookup by an already-normalized key.
    pub fn lookup_normalized(&self, key: &str) -> &[EntityId] {
        self.postings.get(key).map_or(&[], Vec::as_slice)
    }

    pub fn key_count(&self) -> usize {
        self.postings.len()
    }

    /// Sum of posting lengths, i.e. distinct (entity, normalized name) pairs.
    pub fn posting_count(&self) -> usize {
        self.postings.values().map(Vec::len).sum()
    }

    /// Keys and postings in name order.
    pub fn sorted(&self) -> BTreeMap<&str, &[EntityId]> {
        self.postings.iter().map(|(k, v)| (k.as_str(), v.as_slice())).collect()
    }

    pub fn write_binary<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write_header(w, MAGIC, VERSION)?;
        write_u8(w, self.policy.tag())?;
        write_u64(w, self.postings.len() as u64)?;
        for (key, ids) in self.sorted() {
            write_str(w, key)?;
            write_u64(w, ids.len() as u64)?;
            ids.iter().try_for_each(|id| write_u32(w, id.0))?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> io::Result<Self> {
        let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
        read_header(r, MAGIC, VERSION)?;
        let policy = NormalizationPolicy::from_tag(read_u8(r)?).ok_or_else(|| bad("unknown policy tag"))?;
        let keys = read_u64(r)?;
        let mut postings = HashMap::new();
        for _ in 0..keys {
            let key = read_str(r)?;
            let n = read_u64(r)?;
            let mut ids: Vec<EntityId> = Vec::with_capacity(n.min(1 << 20) as usize);
            for _ in 0..n {
                let id = EntityId(read_u32(r)?);
                if ids.last().is_some_and(|&prev| prev >= id) {
                    return Err(bad("posting list not strictly ascending"));
                }
                ids.push(id);
            }
            postings.insert(key, ids);
        }
        Ok(NameIndex { policy, postings })
    }

    pub fn write_tsv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (key, ids) in self.sorted() {
            let ids: Vec<String> = ids.iter().map(|id| id.0.to_string()).collect();
            writeln!(w, "{}\t{}", key, ids.join(","))?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R, policy: NormalizationPolicy) -> Result<Self> {
        let mut postings = HashMap::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let loc = || format!("name index TSV line {}", i + 1);
            let (key, ids) = line.rsplit_once('\t').ok_or_else(|| Error::format(loc(), "missing tab"))?;
            let ids = ids
                .split(',')
                .map(|s| s.parse::<u32>().map(EntityId))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Error::format(loc(), e.to_string()))?;
            postings.insert(key.to_string(), ids);
        }
        Ok(NameIndex { policy, postings })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_binary(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_binary(&mut BufReader::new(file)).map_err(|e| Error::io(path, e))
    }
}

const MAGIC: &[u8; 8] = b"KGMNAMES";
const VERSION: u32 = 1;

#[cfg(test)]
mod tests {
    use super::*;

    fn names(entries: &[(u32, &[&str])]) -> NameMap {
        entries.iter().map(|(e, ns)| (EntityId(*e), ns.iter().map(|s| s.to_string()).collect())).collect()
    }

    #[test]
    fn normalization_examples() {
        use NormalizationPolicy::*;
        assert_eq!(normalize_name("  Adam  Smith ", Exact), "Adam Smith");
        assert_eq!(normalize_name("Adam Smith", Exact), "Adam Smith");
        assert_eq!(normalize_name("ADAM SMITH", Casefold), "adam smith");
        assert_eq!(normalize_name("ADAM SMITH", Exact), "ADAM SMITH");
        assert_eq!(normalize_name("Adam\t\nSmith", Exact), "Adam Smith");
        // e + combining acute composes to U+00E9
        assert_eq!(normalize_name("Jose\u{301}", Exact), "Jos\u{e9}");
    }

    #[test]
    fn build_examples() {
        let p = NormalizationPolicy::Exact;
        let idx = NameIndex::build(&names(&[(1, &["X"]), (2, &["X"])]), p);
        assert_eq!(idx.lookup("X"), &[EntityId(1), EntityId(2)]);

        let idx = NameIndex::build(&NameMap::new(), p);
        assert_eq!(idx.key_count(), 0);

        let idx = NameIndex::build(&names(&[(1, &["X", "Y"])]), p);
        assert_eq!(idx.lookup("X"), &[EntityId(1)]);
        assert_eq!(idx.lookup("Y"), &[EntityId(1)]);
    }

    #[test]
    fn john_burt_lookup() {
        let idx = NameIndex::build(
            &names(&[
                (3, &["John Burt"]),
                (7, &["John Burt"]),
                (8, &["Someone Else"]),
                (10, &["John  Burt"]),
                (12, &["John Burt", " John Burt"]),
            ]),
            NormalizationPolicy::Exact,
        );
        assert_eq!(idx.lookup("John Burt").len(), 4);
        assert_eq!(idx.lookup("  John  Burt "), idx.lookup("John Burt"));
        assert!(idx.lookup("Jane Burt").is_empty());
        assert_eq!(idx.posting_count(), 5);
    }

    #[test]
    fn binary_and_tsv_round_trip() {
        let idx = NameIndex::build(&names(&[(0, &["a b"]), (4, &["a b", "c"])]), NormalizationPolicy::Casefold);
        let mut buf = Vec::new();
        idx.write_binary(&mut buf).unwrap();
        assert_eq!(NameIndex::read_binary(&mut &buf[..]).unwrap(), idx);

        let mut tsv = Vec::new();
        idx.write_tsv(&mut tsv).unwrap();
        assert_eq!(String::from_utf8(tsv.clone()).unwrap(), "a b\t0,4\nc\t4\n");
        assert_eq!(NameIndex::read_tsv(&tsv[..], NormalizationPolicy::Casefold).unwrap(), idx);
    }
}
