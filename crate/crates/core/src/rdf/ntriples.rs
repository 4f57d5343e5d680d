use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use log::warn;

use crate::error::{Error, Result};

/// Literal object: lexical form plus optional language tag or datatype IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub lexical: String,
    pub language: Option<String>,
    pub datatype: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), language: None, datatype: None }
    }

    pub fn tagged(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), language: Some(language.into()), datatype: None }
    }
}

/// Triple object. Resources are IRIs or blank nodes; blank nodes keep their
/// `_:` prefix, which can never start an absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Object {
    Resource(String),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    /// IRI or `_:label` blank node.
    pub subject: String,
    pub predicate: String,
    pub object: Object,
}

impl Triple {
    pub fn resource(s: impl Into<String>, p: impl Into<String>, o: impl Into<String>) -> Self {
        Triple { subject: s.into(), predicate: p.into(), object: Object::Resource(o.into()) }
    }

    pub fn literal(s: impl Into<String>, p: impl Into<String>, o: Literal) -> Self {
        Triple { subject: s.into(), predicate: p.into(), object: Object::Literal(o) }
    }
}

fn write_resource(f: &mut fmt::Formatter<'_>, r: &str) -> fmt::Result {
    if r.starts_with("_:") {
        return f.write_str(r);
    }
    f.write_str("<")?;
    for c in r.chars() {
        match c {
            '\u{0}'..='\u{20}' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\' => {
                write!(f, "\\u{:04X}", c as u32)?
            }
            _ => write!(f, "{c}")?,
        }
    }
    f.write_str(">")
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_resource(f, &self.subject)?;
        f.write_str(" ")?;
        write_resource(f, &self.predicate)?;
        f.write_str(" ")?;
        match &self.object {
            Object::Resource(r) => write_resource(f, r)?,
            Object::Literal(lit) => {
                f.write_str("\"")?;
                for c in lit.lexical.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        '\t' => f.write_str("\\t")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")?;
                if let Some(lang) = &lit.language {
                    write!(f, "@{lang}")?;
                } else if let Some(dt) = &lit.datatype {
                    f.write_str("^^")?;
                    write_resource(f, dt)?;
                }
            }
        }
        f.write_str(" .")
    }
}

/// Writes triples one per line.
pub fn write_ntriples<'a, W: Write>(
    mut out: W,
    triples: impl IntoIterator<Item = &'a Triple>,
) -> std::io::Result<()> {
    for t in triples {
        writeln!(out, "{t}")?;
    }
    Ok(())
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ') | Some('\t')) {
            self.pos += 1;
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T, String> {
        Err(format!("column {}: {msg}", self.pos + 1))
    }

    fn hex_escape(&mut self, digits: usize) -> Result<char, String> {
        let start = self.pos;
        for _ in 0..digits {
            match self.bump() {
                Some(c) if c.is_ascii_hexdigit() => {}
                _ => return self.err("bad unicode escape"),
            }
        }
        let code = u32::from_str_radix(&self.s[start..self.pos], 16).map_err(|e| e.to_string())?;
        match char::from_u32(code) {
            Some(c) => Ok(c),
            None => self.err("unicode escape is not a scalar value"),
        }
    }

    fn iri(&mut self) -> Result<String, String> {
        if !self.eat('<') {
            return self.err("expected '<'");
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.err("unterminated IRI"),
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => out.push(self.hex_escape(4)?),
                    Some('U') => out.push(self.hex_escape(8)?),
                    _ => return self.err("bad escape in IRI"),
                },
                Some(c @ ('\u{0}'..='\u{20}' | '<' | '"' | '{' | '}' | '|' | '^' | '`')) => {
                    return self.err(&format!("illegal character {c:?} in IRI"))
                }
                Some(c) => out.push(c),
            }
        }
        if out.is_empty() {
            return self.err("empty IRI");
        }
        Ok(out)
    }

    fn blank(&mut self) -> Result<String, String> {
        if !(self.eat('_') && self.eat(':')) {
            return self.err("expected blank node '_:'");
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':') {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        // A label cannot end with '.'; that dot terminates the statement.
        while self.pos > start && self.s[..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        if self.pos == start {
            return self.err("empty blank node label");
        }
        Ok(format!("_:{}", &self.s[start..self.pos]))
    }

    fn resource(&mut self) -> Result<String, String> {
        match self.peek() {
            Some('<') => self.iri(),
            Some('_') => self.blank(),
            _ => self.err("expected IRI or blank node"),
        }
    }

    fn literal(&mut self) -> Result<Literal, String> {
        self.eat('"');
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return self.err("unterminated literal"),
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('t') => lexical.push('\t'),
                    Some('b') => lexical.push('\u{8}'),
                    Some('n') => lexical.push('\n'),
                    Some('r') => lexical.push('\r'),
                    Some('f') => lexical.push('\u{c}'),
                    Some('"') => lexical.push('"'),
                    Some('\'') => lexical.push('\''),
                    Some('\\') => lexical.push('\\'),
                    Some('u') => lexical.push(self.hex_escape(4)?),
                    Some('U') => lexical.push(self.hex_escape(8)?),
                    _ => return self.err("bad escape in literal"),
                },
                Some(c) => lexical.push(c),
            }
        }
        let mut lit = Literal { lexical, language: None, datatype: None };
        if self.eat('@') {
            let start = self.pos;
            let mut seg_len = 0usize;
            let mut first = true;
            while let Some(c) = self.peek() {
                if c.is_ascii_alphabetic() || (!first && c.is_ascii_digit()) {
                    seg_len += 1;
                } else if c == '-' && seg_len > 0 {
                    seg_len = 0;
                    first = false;
                } else {
                    break;
                }
                self.pos += 1;
            }
            if seg_len == 0 {
                return self.err("malformed language tag");
            }
            lit.language = Some(self.s[start..self.pos].to_string());
        } else if self.s[self.pos..].starts_with("^^") {
            self.pos += 2;
            lit.datatype = Some(self.iri()?);
        }
        Ok(lit)
    }

    fn triple(&mut self) -> Result<Option<Triple>, String> {
        self.skip_ws();
        match self.peek() {
            None | Some('#') => return Ok(None),
            _ => {}
        }
        let subject = self.resource()?;
        self.skip_ws();
        let predicate = self.iri()?;
        self.skip_ws();
        let object = match self.peek() {
            Some('"') => Object::Literal(self.literal()?),
            Some('<') | Some('_') => Object::Resource(self.resource()?),
            _ => return self.err("expected object"),
        };
        self.skip_ws();
        if !self.eat('.') {
            return self.err("expected '.'");
        }
        self.skip_ws();
        match self.peek() {
            None | Some('#') => Ok(Some(Triple { subject, predicate, object })),
            _ => self.err("trailing content after '.'"),
        }
    }
}

/// Parses one line. Blank and comment lines yield `Ok(None)`.
pub fn parse_line(line: &str) -> Result<Option<Triple>, String> {
    let line = line.strip_suffix('\n').unwrap_or(line);
    let line = line.strip_suffix('\r').unwrap_or(line);
    Cursor { s: line, pos: 0 }.triple()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedLine {
    pub line: u64,
    pub message: String,
}

const MAX_KEPT_ERRORS: usize = 1000;
const MAX_LOGGED_ERRORS: u64 = 20;

/// Streaming reader. Yields well-formed triples in order; malformed lines are
/// counted and skipped. Only stream I/O errors are returned as `Err`, after
/// which iteration ends.
pub struct NTriplesReader<R> {
    inner: R,
    buf: Vec<u8>,
    line_no: u64,
    malformed: u64,
    errors: Vec<MalformedLine>,
    done: bool,
}

impl<R: BufRead> NTriplesReader<R> {
    pub fn new(inner: R) -> Self {
        NTriplesReader { inner, buf: Vec::new(), line_no: 0, malformed: 0, errors: Vec::new(), done: false }
    }

    pub fn malformed_count(&self) -> u64 {
        self.malformed
    }

    /// The first malformed lines (capped), with 1-based line numbers.
    pub fn errors(&self) -> &[MalformedLine] {
        &self.errors
    }

    pub fn lines_read(&self) -> u64 {
        self.line_no
    }

    fn record(&mut self, message: String) {
        self.malformed += 1;
        if self.malformed <= MAX_LOGGED_ERRORS {
            warn!("skipping malformed N-Triples line {}: {message}", self.line_no);
        }
        if self.errors.len() < MAX_KEPT_ERRORS {
            self.errors.push(MalformedLine { line: self.line_no, message });
        }
    }
}

impl<R: BufRead> Iterator for NTriplesReader<R> {
    type Item = Result<Triple>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            match self.inner.read_until(b'\n', &mut self.buf) {
                Ok(0) => self.done = true,
                Ok(_) => {
                    self.line_no += 1;
                    let parsed = match std::str::from_utf8(&self.buf) {
                        Ok(line) => parse_line(line),
                        Err(e) => Err(format!("invalid UTF-8: {e}")),
                    };
                    match parsed {
                        Ok(Some(t)) => return Some(Ok(t)),
                        Ok(None) => {}
                        Err(msg) => self.record(msg),
                    }
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(Error::Stream(e)));
                }
            }
        }
        None
    }
}

#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub triples: Vec<Triple>,
    pub malformed: u64,
    pub errors: Vec<MalformedLine>,
}

/// Parses a whole stream into memory.
pub fn parse_ntriples<R: BufRead>(input: R) -> Result<ParseOutcome> {
    let mut reader = NTriplesReader::new(input);
    let mut triples = Vec::new();
    for t in reader.by_ref() {
        triples.push(t?);
    }
    Ok(ParseOutcome { triples, malformed: reader.malformed, errors: reader.errors })
}

/// Opens an N-Triples file, transparently decompressing gzip (by magic bytes).
pub fn open_ntriples(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 16, file);
    let head = reader.fill_buf().map_err(|e| Error::io(path, e))?;
    if head.starts_with(&[0x1f, 0x8b]) {
        let decoder: Box<dyn Read + Send> = Box::new(MultiGzDecoder::new(reader));
        Ok(Box::new(BufReader::with_capacity(1 << 16, decoder)))
    } else {
        Ok(Box::new(reader))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_resource_triple() {
        let t = parse_line("<http://a> <http://p> <http://b> .").unwrap().unwrap();
        assert_eq!(t, Triple::resource("http://a", "http://p", "http://b"));
    }

    #[test]
    fn language_tagged_literal() {
        let t = parse_line("<http://a> <http://p> \"Adam Smith\"@en .").unwrap().unwrap();
        assert_eq!(t.object, Object::Literal(Literal::tagged("Adam Smith", "en")));
    }

    #[test]
    fn datatype_literal_and_escapes() {
        let t = parse_line(r#"<http://a> <http://p> "x\"yé\n"^^<http://www.w3.org/2001/XMLSchema#string> ."#)
            .unwrap()
            .unwrap();
        match t.object {
            Object::Literal(l) => {
                assert_eq!(l.lexical, "x\"y\u{e9}\n");
                assert_eq!(l.datatype.as_deref(), Some("http://www.w3.org/2001/XMLSchema#string"));
            }
            _ => panic!("expected literal"),
        }
    }

    #[test]
    fn blank_nodes_keep_prefix() {
        let t = parse_line("_:b1 <http://p> _:b2.").unwrap().unwrap();
        assert_eq!(t.subject, "_:b1");
        assert_eq!(t.object, Object::Resource("_:b2".into()));
    }

    #[test]
    fn comments_and_blank_lines() {
        assert_eq!(parse_line("").unwrap(), None);
        assert_eq!(parse_line("   # comment").unwrap(), None);
        assert!(parse_line("<http://a> <http://p> <http://b> . # trailing").unwrap().is_some());
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "garbage",
            "<http://a> <http://p> <http://b>",
            "<http://a> \"lit\" <http://b> .",
            "<http://a> <http://p> \"open .",
            "<http://a b> <http://p> <http://b> .",
            "<> <http://p> <http://b> .",
            "<http://a> <http://p> <http://b> . extra",
            "<http://a> <http://p> \"x\"@ .",
        ] {
            assert!(parse_line(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn reader_counts_and_skips_garbage() {
        let input = "<http://a> <http://p> <http://b> .\ngarbage\n\n<http://b> <http://p> \"x\" .\n";
        let out = parse_ntriples(input.as_bytes()).unwrap();
        assert_eq!(out.triples.len(), 2);
        assert_eq!(out.malformed, 1);
        assert_eq!(out.errors[0].line, 2);
    }

    #[test]
    fn invalid_utf8_is_malformed_not_fatal() {
        let mut input = b"<http://a> <http://p> <http://b> .\n".to_vec();
        input.extend_from_slice(&[0xff, 0xfe, b'\n']);
        let out = parse_ntriples(&input[..]).unwrap();
        assert_eq!((out.triples.len(), out.malformed), (1, 1));
    }

    #[test]
    fn display_round_trips() {
        let triples = vec![
            Triple::resource("http://a", "http://p", "_:x"),
            Triple::literal("http://a", "http://p", Literal::tagged("tab\there \"q\" \\", "en-GB")),
            Triple::literal(
                "http://a",
                "http://p",
                Literal { lexical: "3".into(), language: None, datatype: Some("http://dt".into()) },
            ),
            Triple::resource("http://a b", "http://p", "http://x>y"),
        ];
        let mut buf = Vec::new();
        write_ntriples(&mut buf, &triples).unwrap();
        let back = parse_ntriples(&buf[..]).unwrap();
        assert_eq!(back.malformed, 0);
        assert_eq!(back.triples, triples);
    }
}
