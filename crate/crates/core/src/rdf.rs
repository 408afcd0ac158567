//! RDF terms and the N-Triples line format.
//!
//! N-Triples is the only ingestion format. Other serializations (RDF/XML,
//! Turtle, functional syntax) must be converted externally first.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write as _};
use std::hash::Hasher;
use std::io::{BufRead, Write};
use std::sync::Arc;

use fnv::FnvHasher;

use crate::error::{Error, Result};

/// An absolute IRI. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self> {
        let value = value.as_ref();
        let valid = !value.is_empty()
            && value.find(':').is_some_and(|i| i > 0)
            && !value
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '`'));
        if valid {
            Ok(Iri(Arc::from(value)))
        } else {
            Err(Error::InvalidIri(value.to_string()))
        }
    }

    /// Builds an IRI from a string known to be valid (vocabulary constants).
    pub(crate) fn from_static(value: &str) -> Self {
        debug_assert!(Iri::new(value).is_ok(), "{value}");
        Iri(Arc::from(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Local name after the final `#` or `/`.
    pub fn name(&self) -> &str {
        let s = self.as_str();
        match s.rfind(['#', '/']) {
            Some(i) => &s[i + 1..],
            None => s.split_once(':').map_or(s, |(_, rest)| rest),
        }
    }

    pub fn namespace(&self) -> &str {
        let s = self.as_str();
        &s[..s.len() - self.name().len()]
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Option<Iri>,
    pub lang: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            lang: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, lang: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            lang: Some(lang.into()),
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Some(datatype),
            lang: None,
        }
    }

    /// English means an `en` / `en-*` tag, or no tag at all.
    pub fn is_english(&self) -> bool {
        match &self.lang {
            None => true,
            Some(tag) => {
                let tag = tag.to_ascii_lowercase();
                tag == "en" || tag.starts_with("en-")
            }
        }
    }

    /// Plain, language-tagged or `xsd:string` literals.
    pub fn is_textual(&self) -> bool {
        self.lang.is_some()
            || match &self.datatype {
                None => true,
                Some(dt) => {
                    dt.as_str() == crate::vocab::XSD_STRING || dt.as_str() == crate::vocab::RDF_LANG_STRING
                }
            }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('"')?;
        for c in self.lexical.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\r' => f.write_str("\\r")?,
                '\t' => f.write_str("\\t")?,
                c => f.write_char(c)?,
            }
        }
        f.write_char('"')?;
        if let Some(lang) = &self.lang {
            write!(f, "@{lang}")
        } else if let Some(dt) = &self.datatype {
            write!(f, "^^<{dt}>")
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    /// Blank node label without the `_:` prefix.
    Blank(String),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_blank(&self) -> Option<&str> {
        match self {
            Term::Blank(label) => Some(label),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Blank(label) => write!(f, "_:{label}"),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Term>, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}> {} .", self.subject, self.predicate, self.object)
    }
}

/// Parses an N-Triples document. Duplicate triples are dropped, first
/// occurrence wins.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>> {
    let mut seen = HashSet::new();
    let mut triples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(triple) = parse_line(line, i + 1)? {
            if seen.insert(triple.clone()) {
                triples.push(triple);
            }
        }
    }
    Ok(triples)
}

pub fn read_ntriples<R: BufRead>(reader: R) -> Result<Vec<Triple>> {
    let mut seen = HashSet::new();
    let mut triples = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        if let Some(triple) = parse_line(&line?, i + 1)? {
            if seen.insert(triple.clone()) {
                triples.push(triple);
            }
        }
    }
    Ok(triples)
}

pub fn write_ntriples<'a, W, I>(mut out: W, triples: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Triple>,
{
    for triple in triples {
        writeln!(out, "{triple}")?;
    }
    Ok(())
}

pub fn to_ntriples_string<'a, I: IntoIterator<Item = &'a Triple>>(triples: I) -> String {
    let mut s = String::new();
    for t in triples {
        let _ = writeln!(s, "{t}");
    }
    s
}

/// Parses a single line. Blank and comment lines yield `None`.
pub fn parse_line(line: &str, line_no: usize) -> Result<Option<Triple>> {
    let mut cur = Cursor {
        chars: line.chars().collect(),
        pos: 0,
        line: line_no,
    };
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        _ => return Err(cur.error("expected IRI or blank node as subject")),
    };
    cur.skip_ws();
    if cur.peek() != Some('<') {
        return Err(cur.error("expected IRI as predicate"));
    }
    let predicate = cur.iri()?;
    cur.skip_ws();
    let object = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        Some('"') => Term::Literal(cur.literal()?),
        _ => return Err(cur.error("expected IRI, blank node or literal as object")),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err(cur.error("expected '.' terminating the triple"));
    }
    cur.pos += 1;
    cur.skip_ws();
    if !cur.at_end() && cur.peek() != Some('#') {
        return Err(cur.error("trailing content after '.'"));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::parse(self.line, format!("{message} (column {})", self.pos + 1))
    }

    fn iri(&mut self) -> Result<Iri> {
        self.pos += 1; // '<'
        let mut value = String::new();
        loop {
            match self.next() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => break,
                Some('\\') => value.push(self.unicode_escape()?),
                Some(c) => value.push(c),
            }
        }
        Iri::new(&value).map_err(|_| self.error(&format!("invalid IRI <{value}>")))
    }

    fn blank(&mut self) -> Result<String> {
        if self.next() != Some('_') || self.next() != Some(':') {
            return Err(self.error("malformed blank node"));
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                self.pos += 1;
            } else {
                break;
            }
        }
        // a trailing '.' belongs to the statement terminator
        while self.pos > start && self.chars[self.pos - 1] == '.' {
            self.pos -= 1;
        }
        if self.pos == start {
            return Err(self.error("empty blank node label"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn literal(&mut self) -> Result<Literal> {
        self.pos += 1; // '"'
        let mut lexical = String::new();
        loop {
            match self.next() {
                None => return Err(self.error("unterminated literal")),
                Some('"') => break,
                Some('\\') => match self.peek() {
                    Some('u' | 'U') => lexical.push(self.unicode_escape()?),
                    Some(c) => {
                        self.pos += 1;
                        lexical.push(match c {
                            't' => '\t',
                            'b' => '\u{8}',
                            'n' => '\n',
                            'r' => '\r',
                            'f' => '\u{c}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            _ => return Err(self.error("invalid escape sequence")),
                        });
                    }
                    None => return Err(self.error("unterminated escape")),
                },
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    self.pos += 1;
                }
                if self.pos == start {
                    return Err(self.error("empty language tag"));
                }
                let lang: String = self.chars[start..self.pos].iter().collect();
                Ok(Literal::lang(lexical, lang))
            }
            Some('^') => {
                if self.next() != Some('^') || self.next() != Some('^') || self.peek() != Some('<') {
                    return Err(self.error("malformed datatype"));
                }
                let dt = self.iri()?;
                Ok(Literal::typed(lexical, dt))
            }
            _ => Ok(Literal::plain(lexical)),
        }
    }

    /// Called after a backslash; expects `uXXXX` or `UXXXXXXXX`.
    fn unicode_escape(&mut self) -> Result<char> {
        let width = match self.next() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape sequence")),
        };
        if self.pos + width > self.chars.len() {
            return Err(self.error("truncated unicode escape"));
        }
        let hex: String = self.chars[self.pos..self.pos + width].iter().collect();
        self.pos += width;
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error("invalid unicode escape"))
    }
}

/// Renders a triple set with blank nodes replaced by structural digests, so
/// two graphs that differ only in blank-node labels compare equal.
///
/// Blank labels are refined from their incident triples until stable, the
/// same way colour refinement works. Exact for tree-shaped blank structures,
/// which is what the OWL mapping produces.
pub fn canonical_form(triples: &[Triple]) -> BTreeSet<String> {
    let blanks: BTreeSet<&str> = triples
        .iter()
        .flat_map(|t| [&t.subject, &t.object])
        .filter_map(Term::as_blank)
        .collect();
    let mut labels: BTreeMap<&str, u64> = blanks.iter().map(|b| (*b, 0)).collect();

    let render = |term: &Term, labels: &BTreeMap<&str, u64>| -> String {
        match term {
            Term::Blank(b) => format!("_:c{:016x}", labels[b.as_str()]),
            other => other.to_string(),
        }
    };

    for _ in 0..=blanks.len() {
        let mut next = BTreeMap::new();
        for &b in &blanks {
            let mut sig: Vec<String> = Vec::new();
            for t in triples {
                if t.subject.as_blank() == Some(b) {
                    sig.push(format!("out {} {}", t.predicate, render(&t.object, &labels)));
                }
                if t.object.as_blank() == Some(b) {
                    sig.push(format!("in {} {}", render(&t.subject, &labels), t.predicate));
                }
            }
            sig.sort();
            let mut h = FnvHasher::default();
            h.write_u64(labels[b]);
            for s in &sig {
                h.write(s.as_bytes());
                h.write_u8(0);
            }
            next.insert(b, h.finish());
        }
        let stable = partition_of(&labels) == partition_of(&next);
        labels = next;
        if stable {
            break;
        }
    }

    triples
        .iter()
        .map(|t| {
            format!(
                "{} <{}> {} .",
                render(&t.subject, &labels),
                t.predicate,
                render(&t.object, &labels)
            )
        })
        .collect()
}

fn partition_of(labels: &BTreeMap<&str, u64>) -> usize {
    labels.values().collect::<BTreeSet<_>>().len()
}
