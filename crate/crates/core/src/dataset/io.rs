//! Dataset files.
//!
//! One UTF-8 TSV line per query:
//! `query_iri \t query_name \t positive_iri \t cand_1,cand_2,...`.
//! Backslash escapes `\\`, `\t`, `\n`, `\r` apply to every field; commas
//! inside candidate IRIs are written as `\,`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DatasetMeta, DatasetSplit, MatchDataset, MatchQuery};
use crate::error::{Error, Result};

fn escape(s: &str, comma: bool) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            ',' if comma => out.push_str("\\,"),
            _ => out.push(c),
        }
    }
    out
}

/// Unescapes one field; with `split_commas`, also splits on unescaped commas.
fn unescape(s: &str, split_commas: bool) -> std::result::Result<Vec<String>, String> {
    let mut parts = vec![String::new()];
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some('\\') => parts.last_mut().unwrap().push('\\'),
                Some('t') => parts.last_mut().unwrap().push('\t'),
                Some('n') => parts.last_mut().unwrap().push('\n'),
                Some('r') => parts.last_mut().unwrap().push('\r'),
                Some(',') => parts.last_mut().unwrap().push(','),
                other => return Err(format!("bad escape \\{}", other.map(String::from).unwrap_or_default())),
            },
            ',' if split_commas => parts.push(String::new()),
            _ => parts.last_mut().unwrap().push(c),
        }
    }
    Ok(parts)
}

pub fn write_dataset_tsv<W: Write>(w: &mut W, ds: &MatchDataset) -> std::io::Result<()> {
    for q in &ds.queries {
        let cands: Vec<String> = q.candidates.iter().map(|c| escape(c, true)).collect();
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            escape(&q.query, false),
            escape(&q.name, false),
            escape(q.positive_iri(), false),
            cands.join(",")
        )?;
    }
    Ok(())
}

/// Reads a dataset TSV, validating every query. `source` names the input in errors.
pub fn read_dataset_tsv<R: BufRead>(r: R, direction: &str, source: &str) -> Result<MatchDataset> {
    let mut queries = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let loc = || format!("{source}:{}", i + 1);
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::format(loc(), format!("expected 4 tab-separated fields, found {}", fields.len())));
        }
        let one = |f: &str| unescape(f, false).map(|mut v| v.remove(0)).map_err(|m| Error::format(loc(), m));
        let query = one(fields[0])?;
        let name = one(fields[1])?;
        let positive_iri = one(fields[2])?;
        let candidates = unescape(fields[3], true).map_err(|m| Error::format(loc(), m))?;
        let positive = candidates
            .iter()
            .position(|c| *c == positive_iri)
            .ok_or_else(|| Error::format(loc(), "positive IRI is not among the candidates"))?;
        let q = MatchQuery { query, name, candidates, positive };
        q.validate().map_err(|e| Error::format(loc(), e.to_string()))?;
        queries.push(q);
    }
    let ds = MatchDataset::new(direction, queries);
    ds.validate().map_err(|e| Error::format(source, e.to_string()))?;
    Ok(ds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

/// JSON sidecar written next to the three split files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitMeta {
    pub direction: String,
    pub ratios: [f64; 3],
    pub seed: u64,
    pub counts: SplitCounts,
    pub dataset: DatasetMeta,
}

/// Paths of a split written under `dir` with file stem `stem`.
#[derive(Debug, Clone)]
pub struct SplitFiles {
    pub train: PathBuf,
    pub valid: PathBuf,
    pub test: PathBuf,
    pub meta: PathBuf,
}

impl SplitFiles {
    pub fn new(dir: &Path, stem: &str) -> Self {
        SplitFiles {
            train: dir.join(format!("{stem}.train.tsv")),
            valid: dir.join(format!("{stem}.valid.tsv")),
            test: dir.join(format!("{stem}.test.tsv")),
            meta: dir.join(format!("{stem}.meta.json")),
        }
    }

    pub fn split_path(&self, split: &str) -> Option<&Path> {
        match split {
            "train" => Some(&self.train),
            "valid" | "validation" => Some(&self.valid),
            "test" => Some(&self.test),
            _ => None,
        }
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn write_split(files: &SplitFiles, split: &DatasetSplit) -> Result<()> {
    for (path, ds) in [(&files.train, &split.train), (&files.valid, &split.valid), (&files.test, &split.test)] {
        ds.validate()?;
        write_file(path, |w| write_dataset_tsv(w, ds))?;
    }
    let meta = SplitMeta {
        direction: split.train.direction.clone(),
        ratios: split.ratios,
        seed: split.seed,
        counts: SplitCounts { train: split.train.len(), valid: split.valid.len(), test: split.test.len() },
        dataset: split.train.meta.clone(),
    };
    write_file(&files.meta, |w| {
        serde_json::to_writer_pretty(&mut *w, &meta)?;
        writeln!(w)
    })
}

pub fn read_split(files: &SplitFiles) -> Result<DatasetSplit> {
    let meta_file = File::open(&files.meta).map_err(|e| Error::io(&files.meta, e))?;
    let meta: SplitMeta = serde_json::from_reader(BufReader::new(meta_file))
        .map_err(|e| Error::format(files.meta.display().to_string(), e.to_string()))?;
    let read = |path: &Path| -> Result<MatchDataset> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut ds = read_dataset_tsv(BufReader::new(f), &meta.direction, &path.display().to_string())?;
        ds.meta = meta.dataset.clone();
        Ok(ds)
    };
    Ok(DatasetSplit {
        train: read(&files.train)?,
        valid: read(&files.valid)?,
        test: read(&files.test)?,
        ratios: meta.ratios,
        seed: meta.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_round_trip_with_awkward_characters() {
        let ds = MatchDataset::new(
            "DB->WD",
            vec![MatchQuery {
                query: "http://db/Washington,_D.C.".into(),
                name: "Washington, D.C.\tx\\y".into(),
                candidates: vec!["http://wd/a,b".into(), "http://wd/c".into()],
                positive: 0,
            }],
        );
        let mut buf = Vec::new();
        write_dataset_tsv(&mut buf, &ds).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(text.split('\t').count(), 4);
        let back = read_dataset_tsv(&buf[..], "DB->WD", "mem").unwrap();
        assert_eq!(back, ds);
    }

    #[test]
    fn plain_format() {
        let ds = MatchDataset::new(
            "DB->WD",
            vec![MatchQuery { query: "q".into(), name: "John Burt".into(), candidates: vec!["a".into(), "b".into()], positive: 1 }],
        );
        let mut buf = Vec::new();
        write_dataset_tsv(&mut buf, &ds).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "q\tJohn Burt\tb\ta,b\n");
    }

    #[test]
    fn rejects_positive_not_in_candidates() {
        let err = read_dataset_tsv("q\tn\tz\ta,b\n".as_bytes(), "d", "f.tsv").unwrap_err();
        assert!(err.to_string().contains("f.tsv:1"), "{err}");
        assert!(read_dataset_tsv("q\tn\ta\n".as_bytes(), "d", "f.tsv").is_err());
        assert!(read_dataset_tsv("q\tn\ta\ta\n".as_bytes(), "d", "f.tsv").is_err());
    }
}
