//! Versioned binary snapshot of a [`Kg`].
//!
//! Layout (little-endian): magic `KGMGRAPH`, u32 version, entity strings,
//! predicate strings, edge CSR (offsets then `(pred u32, obj u32)` pairs),
//! literal CSR (offsets then `(pred u32, lexical, lang?, datatype?)`).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use indexmap::IndexSet;

use super::graph::{Edge, EntityId, Kg, PredicateId};
use super::ntriples::Literal;
use crate::binio::*;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"KGMGRAPH";
const VERSION: u32 = 1;

fn bad(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn write_strings<W: Write>(w: &mut W, set: &IndexSet<String>) -> io::Result<()> {
    write_u64(w, set.len() as u64)?;
    set.iter().try_for_each(|s| write_str(w, s))
}

fn read_strings<R: Read>(r: &mut R) -> io::Result<IndexSet<String>> {
    let n = read_u64(r)?;
    let mut set = IndexSet::new();
    for _ in 0..n {
        if !set.insert(read_str(r)?) {
            return Err(bad("duplicate interned string"));
        }
    }
    Ok(set)
}

fn write_offsets<W: Write>(w: &mut W, offsets: &[usize]) -> io::Result<()> {
    offsets.iter().try_for_each(|&o| write_u64(w, o as u64))
}

fn read_offsets<R: Read>(r: &mut R, n: usize) -> io::Result<Vec<usize>> {
    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        let o = read_u64(r)? as usize;
        if offsets.last().is_some_and(|&prev| o < prev) {
            return Err(bad("offsets not monotone"));
        }
        offsets.push(o);
    }
    if offsets[0] != 0 {
        return Err(bad("offsets must start at 0"));
    }
    Ok(offsets)
}

pub fn write_kg<W: Write>(w: &mut W, kg: &Kg) -> io::Result<()> {
    write_header(w, MAGIC, VERSION)?;
    write_strings(w, &kg.entities)?;
    write_strings(w, &kg.predicates)?;
    write_offsets(w, &kg.edge_offsets)?;
    for e in &kg.edges {
        write_u32(w, e.predicate.0)?;
        write_u32(w, e.object.0)?;
    }
    write_offsets(w, &kg.literal_offsets)?;
    for (p, lit) in &kg.literals {
        write_u32(w, p.0)?;
        write_str(w, &lit.lexical)?;
        write_opt_str(w, lit.language.as_deref())?;
        write_opt_str(w, lit.datatype.as_deref())?;
    }
    Ok(())
}

pub fn read_kg<R: Read>(r: &mut R) -> io::Result<Kg> {
    read_header(r, MAGIC, VERSION)?;
    let entities = read_strings(r)?;
    let predicates = read_strings(r)?;
    let (n, np) = (entities.len() as u32, predicates.len() as u32);

    let edge_offsets = read_offsets(r, entities.len())?;
    let mut edges = Vec::with_capacity(*edge_offsets.last().unwrap());
    for _ in 0..*edge_offsets.last().unwrap() {
        let (p, o) = (read_u32(r)?, read_u32(r)?);
        if p >= np || o >= n {
            return Err(bad("edge id out of range"));
        }
        edges.push(Edge { predicate: PredicateId(p), object: EntityId(o) });
    }
    let literal_offsets = read_offsets(r, entities.len())?;
    let mut literals = Vec::with_capacity(*literal_offsets.last().unwrap());
    for _ in 0..*literal_offsets.last().unwrap() {
        let p = read_u32(r)?;
        if p >= np {
            return Err(bad("literal predicate id out of range"));
        }
        let lexical = read_str(r)?;
        let language = read_opt_str(r)?;
        let datatype = read_opt_str(r)?;
        literals.push((PredicateId(p), Literal { lexical, language, datatype }));
    }
    Ok(Kg { entities, predicates, edge_offsets, edges, literal_offsets, literals })
}

pub fn write_kg_file(path: &Path, kg: &Kg) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_kg(&mut w, kg).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_kg_file(path: &Path) -> Result<Kg> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_kg(&mut BufReader::new(file)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{build_graph, PredicateFilter, Triple};

    #[test]
    fn snapshot_round_trip() {
        let ts = vec![
            Triple::resource("http://a", "http://p", "http://b"),
            Triple::literal("http://a", "http://n", Literal::tagged("A", "en")),
            Triple::literal("_:x", "http://n", Literal { lexical: "1".into(), language: None, datatype: Some("http://int".into()) }),
            Triple::resource("http://a", "http://p", "http://b"),
        ];
        let kg = build_graph(&ts, &PredicateFilter::default());
        let mut buf = Vec::new();
        write_kg(&mut buf, &kg).unwrap();
        let back = read_kg(&mut &buf[..]).unwrap();
        assert_eq!(back, kg);
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        let kg = build_graph(&[Triple::resource("http://a", "http://p", "http://b")], &PredicateFilter::default());
        let mut buf = Vec::new();
        write_kg(&mut buf, &kg).unwrap();
        assert!(read_kg(&mut &buf[..buf.len() - 3]).is_err());
        buf[0] = b'X';
        assert!(read_kg(&mut &buf[..]).is_err());
    }
}
