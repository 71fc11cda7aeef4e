//! Line-oriented N-Triples subset: IRI subjects and predicates, IRI or
//! literal objects, `#` comments. Blank nodes are not supported.

use std::fmt::Write as _;

use thiserror::Error;

use super::{EntityId, KgError, KnowledgeGraph, Literal, Triple, TripleObject};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A single RDF term as written in N-Triples (and SPARQL TSV results).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Iri(String),
    Literal(Literal),
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn skip_ws(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, (usize, String)> {
        Err((self.pos, message.into()))
    }

    fn iri(&mut self) -> Result<String, (usize, String)> {
        if self.bump() != Some('<') {
            self.pos = self.pos.saturating_sub(1);
            return self.fail("expected '<'");
        }
        let start = self.pos;
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('>') => break,
                Some(c) => out.push(c),
                None => return self.fail("unterminated IRI"),
            }
        }
        super::validate_iri(&out).map_err(|e| match e {
            KgError::MalformedIri { position, reason, .. } => (start + position, format!("malformed IRI: {reason}")),
            other => (start, other.to_string()),
        })?;
        Ok(out)
    }

    fn literal(&mut self) -> Result<Literal, (usize, String)> {
        self.bump(); // opening quote
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.unicode_escape(4)?,
                        Some('U') => self.unicode_escape(8)?,
                        _ => {
                            self.pos = self.pos.saturating_sub(1);
                            return self.fail("invalid escape sequence");
                        }
                    };
                    value.push(c);
                }
                Some(c) => value.push(c),
                None => return self.fail("unterminated literal"),
            }
        }
        let datatype = match self.peek() {
            Some('^') => {
                self.bump();
                if self.bump() != Some('^') {
                    return self.fail("expected '^^'");
                }
                Some(self.iri()?)
            }
            Some('@') => {
                self.bump();
                let mut tag = String::from("@");
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        tag.push(c);
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                if tag.len() == 1 {
                    return self.fail("empty language tag");
                }
                Some(tag)
            }
            _ => None,
        };
        Ok(Literal { value, datatype })
    }

    fn unicode_escape(&mut self, digits: usize) -> Result<char, (usize, String)> {
        let mut code = 0u32;
        for _ in 0..digits {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or((self.pos, "invalid unicode escape".to_string()))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or((self.pos, "invalid code point".to_string()))
    }

    fn term(&mut self) -> Result<Term, (usize, String)> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri()?)),
            Some('"') => Ok(Term::Literal(self.literal()?)),
            Some('_') => self.fail("blank nodes are not supported"),
            Some(_) => self.fail("expected IRI or literal"),
            None => self.fail("unexpected end of line"),
        }
    }
}

/// Parses one N-Triples term, e.g. `<http://ex.org/a>` or `"x"^^<http://...>`.
pub fn parse_term(text: &str) -> Result<Term, String> {
    let mut c = Cursor::new(text.trim());
    let term = c.term().map_err(|(pos, msg)| format!("column {}: {msg}", pos + 1))?;
    if !c.at_end() {
        return Err(format!("column {}: trailing characters", c.pos + 1));
    }
    Ok(term)
}

fn parse_line(line: &str) -> Result<Option<Triple>, (usize, String)> {
    let mut c = Cursor::new(line);
    c.skip_ws();
    if c.at_end() || c.peek() == Some('#') {
        return Ok(None);
    }
    let subject = c.iri()?;
    if c.skip_ws() == 0 {
        return c.fail("expected whitespace after subject");
    }
    let predicate = c.iri()?;
    if c.skip_ws() == 0 {
        return c.fail("expected whitespace after predicate");
    }
    let obj_start = c.pos;
    let object = match c.term()? {
        Term::Iri(iri) => TripleObject::Entity(EntityId(iri)),
        Term::Literal(l) => {
            if l.value.is_empty() {
                return Err((obj_start, "empty literal value".into()));
            }
            TripleObject::Literal(l)
        }
    };
    c.skip_ws();
    if c.peek() != Some('.') {
        return c.fail("expected '.'");
    }
    c.bump();
    c.skip_ws();
    if !(c.at_end() || c.peek() == Some('#')) {
        return c.fail("trailing characters after '.'");
    }
    Ok(Some(Triple {
        subject: EntityId(subject),
        predicate,
        object,
    }))
}

/// Parses a whole document. Errors carry 1-based line and column.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        match parse_line(line) {
            Ok(Some(t)) => out.push(t),
            Ok(None) => {}
            Err((col, message)) => {
                return Err(ParseError {
                    line: idx + 1,
                    column: col + 1,
                    message,
                })
            }
        }
    }
    Ok(out)
}

fn escape_literal(value: &str, out: &mut String) {
    for c in value.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
}

/// Appends the N-Triples form of an object term to `out`.
pub fn write_object(o: &TripleObject, out: &mut String) {
    match o {
        TripleObject::Entity(e) => {
            let _ = write!(out, "<{e}>");
        }
        TripleObject::Literal(l) => {
            out.push('"');
            escape_literal(&l.value, out);
            out.push('"');
            match l.datatype.as_deref() {
                Some(tag) if tag.starts_with('@') => out.push_str(tag),
                Some(dt) => {
                    let _ = write!(out, "^^<{dt}>");
                }
                None => {}
            }
        }
    }
}

/// Serialises the graph, one triple per line in lexicographic order.
pub fn write_ntriples(graph: &KnowledgeGraph) -> String {
    let mut out = String::new();
    for t in graph.triples() {
        let _ = write!(out, "<{}> <{}> ", t.subject, t.predicate);
        write_object(&t.object, &mut out);
        out.push_str(" .\n");
    }
    out
}
