use std::borrow::Cow;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seed;

/// Token → `dim`-dimensional vector.
///
/// Lookups of unknown tokens fall back to a pseudo-random vector seeded by
/// the token and `fallback_seed`, uniform in `[-0.5/dim, 0.5/dim)`. The same
/// token always gets the same fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    values: Vec<f64>,
    fallback_seed: u64,
}

impl EmbeddingTable {
    pub fn new(dim: usize, fallback_seed: u64) -> Self {
        EmbeddingTable { dim, tokens: Vec::new(), index: HashMap::new(), values: Vec::new(), fallback_seed }
    }

    /// Takes row-major `values` (`tokens.len() * dim`).
    pub fn from_parts(dim: usize, tokens: Vec<String>, values: Vec<f64>, fallback_seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Data("embedding dimension must be at least 1".into()));
        }
        if values.len() != tokens.len() * dim {
            return Err(Error::Data(format!(
                "{} values for {} tokens of dimension {dim}",
                values.len(),
                tokens.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite component in vector of {:?}", tokens[i / dim])));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::Data(format!("duplicate token {t:?}")));
            }
        }
        Ok(EmbeddingTable { dim, tokens, index, values, fallback_seed })
    }

    /// Adds or replaces a vector.
    pub fn insert(&mut self, token: &str, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Data(format!("vector for {token:?} has length {}, expected {}", vector.len(), self.dim)));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite component in vector for {token:?}")));
        }
        match self.index.get(token) {
            Some(&i) => self.values[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector),
            None => {
                self.index.insert(token.to_string(), self.tokens.len());
                self.tokens.push(token.to_string());
                self.values.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn fallback_seed(&self) -> u64 {
        self.fallback_seed
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| &self.values[i * self.dim..(i + 1) * self.dim])
    }

    pub fn fallback_vector(&self, token: &str) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::mix64(seed::fnv1a(token.as_bytes()) ^ seed::mix64(self.fallback_seed)));
        let half = 0.5 / self.dim as f64;
        (0..self.dim).map(|_| rng.random_range(-half..half)).collect()
    }

    /// Stored vector, or the deterministic fallback.
    pub fn vector(&self, token: &str) -> Cow<'_, [f64]> {
        match self.get(token) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(self.fallback_vector(token)),
        }
    }

    /// word2vec text format: `count dim` header, then `token v1 ... vd` rows.
    /// Floats use the shortest representation that parses back exactly.
    pub fn write_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.tokens.len(), self.dim)?;
        for (i, t) in self.tokens.iter().enumerate() {
            w.write_all(t.as_bytes())?;
            for v in &self.values[i * self.dim..(i + 1) * self.dim] {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads word2vec text format. `source` names the input in errors.
    pub fn read_text<R: BufRead>(r: R, source: &str, fallback_seed: u64) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::format(format!("{source}:1"), "missing header"))??;
        let mut it = header.split_whitespace();
        let parse_usize = |s: Option<&str>| s.and_then(|s| s.parse::<usize>().ok());
        let (count, dim) = match (parse_usize(it.next()), parse_usize(it.next()), it.next()) {
            (Some(c), Some(d), None) if d > 0 => (c, d),
            _ => return Err(Error::format(format!("{source}:1"), "header must be `vocab_count dim`")),
        };
        let mut table = EmbeddingTable::new(dim, fallback_seed);
        let mut row = vec![0.0; dim];
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let token = parts.next().unwrap();
            let loc = || format!("{source}:{} (token {token:?})", i + 2);
            let mut n = 0;
            for p in parts {
                if n == dim {
                    return Err(Error::format(loc(), format!("more than {dim} values")));
                }
                row[n] = p.parse::<f64>().map_err(|e| Error::format(loc(), format!("bad float {p:?}: {e}")))?;
                n += 1;
            }
            if n != dim {
                return Err(Error::format(loc(), format!("expected {dim} values, found {n}")));
            }
            if table.contains(token) {
                return Err(Error::format(loc(), "duplicate token"));
            }
            table.insert(token, &row).map_err(|e| Error::format(loc(), e.to_string()))?;
        }
        if table.len() != count {
            return Err(Error::format(source, format!("header declares {count} vectors, found {}", table.len())));
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_text(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path, fallback_seed: u64) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_text(BufReader::new(file), &path.display().to_string(), fallback_seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format() {
        let t = EmbeddingTable::from_parts(2, vec!["a".into()], vec![1.0, 2.0], 0).unwrap();
        let mut out = Vec::new();
        t.write_text(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1 2\na 1 2\n");
    }

    #[test]
    fn short_row_is_named() {
        let err = EmbeddingTable::read_text("2 3\na 1 2 3\nb 1 2\n".as_bytes(), "vecs.txt", 0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("vecs.txt:3") && msg.contains("\"b\""), "{msg}");
        assert!(EmbeddingTable::read_text("1 2\na 1 x\n".as_bytes(), "v", 0).is_err());
        assert!(EmbeddingTable::read_text("2 2\na 1 2\n".as_bytes(), "v", 0).is_err());
        assert!(EmbeddingTable::read_text("nonsense\n".as_bytes(), "v", 0).is_err());
    }

    #[test]
    fn known_and_fallback_vectors() {
        let t = EmbeddingTable::from_parts(4, vec!["k".into()], vec![0.1, 0.2, 0.3, 0.4], 9).unwrap();
        assert_eq!(t.vector("k").as_ref(), &[0.1, 0.2, 0.3, 0.4]);
        let u1 = t.vector("unknown");
        let u2 = t.vector("unknown");
        assert_eq!(u1, u2);
        assert_ne!(t.vector("other").as_ref(), u1.as_ref());
        assert!(u1.iter().all(|v| v.abs() <= 0.5 / 4.0));
        let t2 = EmbeddingTable::new(4, 10);
        assert_ne!(t2.vector("unknown").as_ref(), u1.as_ref());
    }

    #[test]
    fn rejects_bad_vectors() {
        let mut t = EmbeddingTable::new(2, 0);
        assert!(t.insert("a", &[1.0]).is_err());
        assert!(t.insert("a", &[1.0, f64::NAN]).is_err());
        assert!(EmbeddingTable::from_parts(2, vec!["a".into()], vec![1.0], 0).is_err());
    }
}
