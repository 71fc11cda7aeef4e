//! Grammar-driven text. Templates contain `#symbol#` rule expansions and
//! `<slot>` data bindings; one alternative is picked per expansion.

mod tree;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use serde::Deserialize;
use thiserror::Error;

pub use tree::{build_dialog_tree, ClueKind, ClueLine, DialogError, FactLine, NpcDialogInput};

const DEFAULT_GRAMMAR: &str = include_str!("../../data/grammar.json");

/// Sentence classes that the shipped grammar must cover, in table order.
pub const TABLE_SYMBOLS: &[&str] = &[
    "greeting-to-player",
    "central-hub",
    "central-hub-response",
    "name-query",
    "name-response",
    "clue-query",
    "clue-response-building",
    "clue-response-concept",
    "clue-response-place",
    "clue-response-person",
    "suspect-fact-query",
    "suspect-fact-response",
    "residence-query",
    "speculation-response",
    "speculation-response-unknown",
];

/// Symbols the generator uses beyond the table.
pub const GENERATOR_SYMBOLS: &[&str] = &[
    "about-query",
    "about-response",
    "statement",
    "statement-denial",
    "item-description",
    "item-clue",
    "key-description",
    "building-description",
    "city-description",
    "npc-description",
    "suspect-description",
    "backstory-intro",
    "backstory-agent",
    "backstory-suspects",
];

pub type SlotBindings = BTreeMap<String, String>;

pub fn bindings<const N: usize>(pairs: [(&str, &str); N]) -> SlotBindings {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Text(String),
    Symbol(String),
    Slot(String),
}

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("grammar is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read grammar {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("symbol `{symbol}` has no alternatives")]
    EmptyRule { symbol: String },
    #[error("symbol `{symbol}` references undefined symbol `{missing}`")]
    UndefinedReference { symbol: String, missing: String },
    #[error("malformed template in `{symbol}`: {reason}: {template:?}")]
    Malformed {
        symbol: String,
        template: String,
        reason: &'static str,
    },
    #[error("expansion cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("undefined symbol `{0}`")]
    UndefinedSymbol(String),
    #[error("symbol `{symbol}` needs slot <{slot}> but it is not bound")]
    UnboundSlot { symbol: String, slot: String },
}

/// A validated grammar: every referenced symbol exists, every rule has at
/// least one alternative and no symbol can reach itself.
#[derive(Debug, Clone)]
pub struct Grammar {
    rules: BTreeMap<String, Vec<Vec<Token>>>,
}

impl Grammar {
    pub fn from_json(text: &str) -> Result<Self, GrammarError> {
        #[derive(Deserialize)]
        #[serde(transparent)]
        struct Raw(BTreeMap<String, Vec<String>>);
        let Raw(raw) = serde_json::from_str(text)?;
        Self::from_rules(raw)
    }

    pub fn from_rules(raw: BTreeMap<String, Vec<String>>) -> Result<Self, GrammarError> {
        let mut rules = BTreeMap::new();
        for (symbol, templates) in &raw {
            if templates.is_empty() {
                return Err(GrammarError::EmptyRule { symbol: symbol.clone() });
            }
            let parsed = templates
                .iter()
                .map(|t| {
                    parse_template(t).map_err(|reason| GrammarError::Malformed {
                        symbol: symbol.clone(),
                        template: t.clone(),
                        reason,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rules.insert(symbol.clone(), parsed);
        }
        let grammar = Grammar { rules };
        grammar.check_references()?;
        grammar.check_acyclic()?;
        Ok(grammar)
    }

    pub fn load(path: &Path) -> Result<Self, GrammarError> {
        let text = std::fs::read_to_string(path).map_err(|source| GrammarError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn has_symbol(&self, symbol: &str) -> bool {
        self.rules.contains_key(symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    pub fn alternatives(&self, symbol: &str) -> usize {
        self.rules.get(symbol).map_or(0, Vec::len)
    }

    fn references(&self, symbol: &str) -> BTreeSet<&str> {
        self.rules[symbol]
            .iter()
            .flatten()
            .filter_map(|t| match t {
                Token::Symbol(s) => Some(s.as_str()),
                _ => None,
            })
            .collect()
    }

    fn check_references(&self) -> Result<(), GrammarError> {
        for symbol in self.rules.keys() {
            if let Some(missing) = self.references(symbol).into_iter().find(|r| !self.has_symbol(r)) {
                return Err(GrammarError::UndefinedReference {
                    symbol: symbol.clone(),
                    missing: missing.to_string(),
                });
            }
        }
        Ok(())
    }

    fn check_acyclic(&self) -> Result<(), GrammarError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        fn visit<'a>(
            g: &'a Grammar,
            s: &'a str,
            marks: &mut BTreeMap<&'a str, Mark>,
            stack: &mut Vec<&'a str>,
        ) -> Result<(), GrammarError> {
            match marks.get(s) {
                Some(Mark::Done) => return Ok(()),
                Some(Mark::Open) => {
                    let from = stack.iter().position(|x| *x == s).unwrap_or(0);
                    let mut cycle: Vec<String> = stack[from..].iter().map(|x| x.to_string()).collect();
                    cycle.push(s.to_string());
                    return Err(GrammarError::Cycle(cycle));
                }
                None => {}
            }
            marks.insert(s, Mark::Open);
            stack.push(s);
            for r in g.references(s) {
                visit(g, r, marks, stack)?;
            }
            stack.pop();
            marks.insert(s, Mark::Done);
            Ok(())
        }
        let mut marks = BTreeMap::new();
        for s in self.rules.keys() {
            visit(self, s, &mut marks, &mut Vec::new())?;
        }
        Ok(())
    }

    /// Expands `symbol` with one uniformly chosen alternative per rule.
    pub fn expand<R: Rng + ?Sized>(
        &self,
        symbol: &str,
        bindings: &SlotBindings,
        rng: &mut R,
    ) -> Result<String, ExpandError> {
        let mut out = String::new();
        self.expand_into(symbol, bindings, rng, &mut out)?;
        Ok(out)
    }

    fn expand_into<R: Rng + ?Sized>(
        &self,
        symbol: &str,
        bindings: &SlotBindings,
        rng: &mut R,
        out: &mut String,
    ) -> Result<(), ExpandError> {
        let alternatives = self
            .rules
            .get(symbol)
            .ok_or_else(|| ExpandError::UndefinedSymbol(symbol.to_string()))?;
        let chosen = &alternatives[rng.gen_range(0..alternatives.len())];
        for token in chosen {
            match token {
                Token::Text(t) => out.push_str(t),
                Token::Symbol(s) => self.expand_into(s, bindings, rng, out)?,
                Token::Slot(slot) => {
                    let value = bindings.get(slot).ok_or_else(|| ExpandError::UnboundSlot {
                        symbol: symbol.to_string(),
                        slot: slot.clone(),
                    })?;
                    out.push_str(value);
                }
            }
        }
        Ok(())
    }
}

impl Default for Grammar {
    fn default() -> Self {
        Grammar::from_json(DEFAULT_GRAMMAR).expect("bundled grammar is valid")
    }
}

fn is_slot_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn parse_template(t: &str) -> Result<Vec<Token>, &'static str> {
    let mut tokens = Vec::new();
    let mut text = String::new();
    let mut chars = t.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '#' | '<' => {
                let close = if c == '#' { '#' } else { '>' };
                let mut name = String::new();
                loop {
                    match chars.next() {
                        Some(x) if x == close => break,
                        Some(x) if is_slot_char(x) => name.push(x),
                        Some(_) => return Err("invalid character in marker name"),
                        None => return Err("unterminated marker"),
                    }
                }
                if name.is_empty() {
                    return Err("empty marker name");
                }
                if !text.is_empty() {
                    tokens.push(Token::Text(std::mem::take(&mut text)));
                }
                tokens.push(if c == '#' {
                    Token::Symbol(name)
                } else {
                    Token::Slot(name)
                });
            }
            '>' => return Err("stray `>`"),
            _ => text.push(c),
        }
    }
    if !text.is_empty() {
        tokens.push(Token::Text(text));
    }
    Ok(tokens)
}

/// How the indefinite article before a substituted word is handled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArticleStyle {
    /// "a"/"an" chosen by whether the next word starts with a vowel letter.
    #[default]
    Smoothed,
    /// Templates are emitted exactly as written ("is an singer").
    Verbatim,
}

impl ArticleStyle {
    pub fn apply(self, text: String) -> String {
        match self {
            ArticleStyle::Smoothed => smooth_articles(&text),
            ArticleStyle::Verbatim => text,
        }
    }
}

pub fn smooth_articles(text: &str) -> String {
    let words: Vec<&str> = text.split(' ').collect();
    let mut out = Vec::with_capacity(words.len());
    for (i, w) in words.iter().enumerate() {
        let fixed = match (*w, words.get(i + 1)) {
            ("a" | "an" | "A" | "An", Some(next)) => match next.chars().next() {
                Some(c) if c.is_alphabetic() => {
                    let vowel = matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u');
                    let capital = w.starts_with('A');
                    match (vowel, capital) {
                        (true, true) => "An",
                        (true, false) => "an",
                        (false, true) => "A",
                        (false, false) => "a",
                    }
                }
                _ => w,
            },
            _ => w,
        };
        out.push(fixed);
    }
    out.join(" ")
}

/// True when no `#symbol#` or `<slot>` marker survives in `text`.
pub fn fully_expanded(text: &str) -> bool {
    parse_template(text).is_ok_and(|tokens| tokens.iter().all(|t| matches!(t, Token::Text(_))))
}
