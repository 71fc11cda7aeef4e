//! In-memory triple store.
//!
//! Facts are `(subject, predicate, object)` triples where the object is either
//! another entity or a literal. The store keeps three indexes next to the raw
//! triple set:
//!
//! * subject → `(predicate, object)` pairs, used for link counting;
//! * `(predicate, object)` → subjects, used to find entities sharing a value;
//! * entity object → `(predicate, subject)`, used for undirected neighbor walks.
//!
//! Entity kinds (person / place / other) are resolved from type-assertion
//! triples through an ordered [`KindConfig`]. Type assertions and the other
//! configured metadata predicates (labels, images) are descriptive only and
//! never count as links between entities.

mod kinds;
mod ntriples;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use percent_encoding::percent_decode_str;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kinds::{KindConfig, KindConfigError, KindRule, RuleKind};
pub use ntriples::{parse_ntriples, parse_term, write_ntriples, write_object, ParseError, Term};

pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KgError {
    #[error("malformed IRI {iri:?} at position {position}: {reason}")]
    MalformedIri {
        iri: String,
        position: usize,
        reason: &'static str,
    },
    #[error("empty literal value")]
    EmptyLiteral,
}

/// Checks that `iri` is an absolute IRI without characters N-Triples forbids.
///
/// On failure the error carries the char offset of the offending character.
pub fn validate_iri(iri: &str) -> Result<(), KgError> {
    let err = |position, reason| KgError::MalformedIri {
        iri: iri.to_string(),
        position,
        reason,
    };
    if iri.is_empty() {
        return Err(err(0, "empty IRI"));
    }
    let mut seen_colon = false;
    for (pos, c) in iri.chars().enumerate() {
        if c.is_whitespace() || c.is_control() {
            return Err(err(pos, "whitespace or control character"));
        }
        if matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`') {
            return Err(err(pos, "forbidden character"));
        }
        if !seen_colon {
            if c == ':' {
                if pos == 0 {
                    return Err(err(0, "missing scheme"));
                }
                seen_colon = true;
            } else if pos == 0 && !c.is_ascii_alphabetic() {
                return Err(err(0, "scheme must start with a letter"));
            } else if !(c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
                return Err(err(pos, "invalid scheme character"));
            }
        }
    }
    if !seen_colon {
        return Err(err(iri.chars().count(), "missing scheme separator ':'"));
    }
    Ok(())
}

/// Identity of a graph entity: an absolute IRI compared by exact string equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EntityId(String);

impl EntityId {
    pub fn new(iri: impl Into<String>) -> Result<Self, KgError> {
        let iri = iri.into();
        validate_iri(&iri)?;
        Ok(EntityId(iri))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The last path segment (or fragment) of the IRI, undecoded.
    pub fn local_name(&self) -> &str {
        let s = self.0.as_str();
        s.rsplit(['/', '#']).next().filter(|l| !l.is_empty()).unwrap_or(s)
    }

    /// A readable name derived from the IRI: percent-decoded local name with
    /// underscores turned into spaces.
    pub fn readable_name(&self) -> String {
        let decoded = percent_decode_str(self.local_name()).decode_utf8_lossy();
        decoded.replace('_', " ")
    }
}

impl TryFrom<String> for EntityId {
    type Error = KgError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        EntityId::new(value)
    }
}

impl From<EntityId> for String {
    fn from(value: EntityId) -> Self {
        value.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub value: String,
    /// Datatype IRI, or `@lang` for language-tagged strings.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
}

impl Literal {
    pub fn plain(value: impl Into<String>) -> Self {
        Literal {
            value: value.into(),
            datatype: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleObject {
    Entity(EntityId),
    Literal(Literal),
}

impl TripleObject {
    pub fn literal(value: impl Into<String>) -> Self {
        TripleObject::Literal(Literal::plain(value))
    }

    pub fn entity(iri: impl Into<String>) -> Result<Self, KgError> {
        Ok(TripleObject::Entity(EntityId::new(iri)?))
    }

    pub fn as_entity(&self) -> Option<&EntityId> {
        match self {
            TripleObject::Entity(e) => Some(e),
            TripleObject::Literal(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub subject: EntityId,
    pub predicate: String,
    pub object: TripleObject,
}

impl Triple {
    pub fn new(subject: EntityId, predicate: impl Into<String>, object: TripleObject) -> Result<Self, KgError> {
        let predicate = predicate.into();
        validate_iri(&predicate)?;
        if let TripleObject::Literal(l) = &object {
            if l.value.is_empty() {
                return Err(KgError::EmptyLiteral);
            }
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    /// Builds a triple from raw strings; `object` is parsed as an IRI.
    pub fn iri(s: &str, p: &str, o: &str) -> Result<Self, KgError> {
        Triple::new(EntityId::new(s)?, p, TripleObject::entity(o)?)
    }

    /// Builds a triple with a plain literal object.
    pub fn lit(s: &str, p: &str, value: &str) -> Result<Self, KgError> {
        Triple::new(EntityId::new(s)?, p, TripleObject::literal(value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Person,
    Place,
    Other,
}

/// A `(predicate, object)` pair asserted for some subject.
pub type Pair = (String, TripleObject);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Classification {
    kind: EntityKind,
    settlement: bool,
}

#[derive(Debug, Clone, Default)]
pub struct KnowledgeGraph {
    triples: BTreeSet<Triple>,
    by_subject: BTreeMap<EntityId, BTreeSet<Pair>>,
    by_pred_obj: BTreeMap<Pair, BTreeSet<EntityId>>,
    by_object: BTreeMap<EntityId, BTreeSet<(String, EntityId)>>,
    classes: BTreeMap<EntityId, Classification>,
    kinds: KindConfig,
}

impl KnowledgeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_kinds(kinds: KindConfig) -> Self {
        KnowledgeGraph {
            kinds,
            ..Default::default()
        }
    }

    pub fn from_triples(kinds: KindConfig, triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut g = KnowledgeGraph::with_kinds(kinds);
        for t in triples {
            g.add_triple(t);
        }
        g
    }

    pub fn kind_config(&self) -> &KindConfig {
        &self.kinds
    }

    /// Inserts a triple. Returns `false` if it was already present.
    pub fn add_triple(&mut self, t: Triple) -> bool {
        if self.triples.contains(&t) {
            return false;
        }
        let pair = (t.predicate.clone(), t.object.clone());
        self.by_subject
            .entry(t.subject.clone())
            .or_default()
            .insert(pair.clone());
        self.by_pred_obj.entry(pair).or_default().insert(t.subject.clone());
        if let TripleObject::Entity(o) = &t.object {
            self.by_object
                .entry(o.clone())
                .or_default()
                .insert((t.predicate.clone(), t.subject.clone()));
        }
        let subject = t.subject.clone();
        self.triples.insert(t);
        self.reclassify(&subject);
        true
    }

    /// Parses and inserts a triple from raw strings, rejecting malformed IRIs.
    pub fn add(&mut self, s: &str, p: &str, o: TripleObject) -> Result<bool, KgError> {
        let t = Triple::new(EntityId::new(s)?, p, o)?;
        Ok(self.add_triple(t))
    }

    fn reclassify(&mut self, subject: &EntityId) {
        let pairs = &self.by_subject[subject];
        let matched = self.kinds.rules.iter().find(|rule| {
            pairs.iter().any(|(p, o)| {
                *p == rule.predicate
                    && match o {
                        TripleObject::Entity(e) => e.as_str() == rule.class,
                        TripleObject::Literal(l) => l.value == rule.class,
                    }
            })
        });
        let class = match matched {
            Some(rule) => Classification {
                kind: rule.kind.entity_kind(),
                settlement: rule.kind == RuleKind::Settlement,
            },
            None => Classification {
                kind: EntityKind::Other,
                settlement: false,
            },
        };
        self.classes.insert(subject.clone(), class);
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.contains(t)
    }

    /// Triples in lexicographic order.
    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn subjects(&self) -> impl Iterator<Item = &EntityId> {
        self.by_subject.keys()
    }

    pub fn is_subject(&self, e: &EntityId) -> bool {
        self.by_subject.contains_key(e)
    }

    /// True if `e` appears anywhere in the graph as subject or entity object.
    pub fn contains_entity(&self, e: &EntityId) -> bool {
        self.by_subject.contains_key(e) || self.by_object.contains_key(e)
    }

    pub fn pairs_of(&self, e: &EntityId) -> impl Iterator<Item = &Pair> {
        self.by_subject.get(e).into_iter().flatten()
    }

    pub fn subjects_with(&self, predicate: &str, object: &TripleObject) -> BTreeSet<EntityId> {
        self.by_pred_obj
            .get(&(predicate.to_string(), object.clone()))
            .cloned()
            .unwrap_or_default()
    }

    /// Objects asserted for `(subject, predicate)`.
    pub fn objects<'a>(
        &'a self,
        subject: &EntityId,
        predicate: &'a str,
    ) -> impl Iterator<Item = &'a TripleObject> + 'a {
        self.by_subject
            .get(subject)
            .into_iter()
            .flatten()
            .filter(move |(p, _)| p == predicate)
            .map(|(_, o)| o)
    }

    /// Whether `predicate` carries a relationship rather than metadata
    /// (typing, labels, images).
    pub fn is_link_predicate(&self, predicate: &str) -> bool {
        !self.kinds.is_metadata(predicate)
    }

    fn link_pairs<'a>(&'a self, e: &EntityId) -> impl Iterator<Item = &'a Pair> + 'a {
        self.pairs_of(e).filter(|(p, _)| self.is_link_predicate(p))
    }

    /// The `(predicate, object)` pairs asserted for both `a` and `b`.
    pub fn shared_pairs(&self, a: &EntityId, b: &EntityId) -> BTreeSet<Pair> {
        let (Some(pa), Some(pb)) = (self.by_subject.get(a), self.by_subject.get(b)) else {
            return BTreeSet::new();
        };
        let (small, large) = if pa.len() <= pb.len() { (pa, pb) } else { (pb, pa) };
        small
            .iter()
            .filter(|pair| self.is_link_predicate(&pair.0) && large.contains(*pair))
            .cloned()
            .collect()
    }

    /// Number of shared pairs, without materialising them.
    pub fn shared_pair_count(&self, a: &EntityId, b: &EntityId) -> usize {
        let (Some(pa), Some(pb)) = (self.by_subject.get(a), self.by_subject.get(b)) else {
            return 0;
        };
        let (small, large) = if pa.len() <= pb.len() { (pa, pb) } else { (pb, pa) };
        small
            .iter()
            .filter(|pair| self.is_link_predicate(&pair.0) && large.contains(*pair))
            .count()
    }

    /// Entities other than `x` sharing at least one pair with `x`, optionally
    /// restricted to one kind.
    pub fn entities_sharing_pair_with(&self, x: &EntityId, kind_filter: Option<EntityKind>) -> BTreeSet<EntityId> {
        let mut out = BTreeSet::new();
        for pair in self.link_pairs(x) {
            if let Some(subjects) = self.by_pred_obj.get(pair) {
                out.extend(
                    subjects
                        .iter()
                        .filter(|e| *e != x)
                        .filter(|e| kind_filter.is_none_or(|k| self.kind_of(e) == k))
                        .cloned(),
                );
            }
        }
        out
    }

    /// Entities joined to `x` by a link triple in either direction.
    pub fn neighbors(&self, x: &EntityId) -> BTreeSet<EntityId> {
        let mut out: BTreeSet<EntityId> = self.link_pairs(x).filter_map(|(_, o)| o.as_entity().cloned()).collect();
        if let Some(incoming) = self.by_object.get(x) {
            out.extend(
                incoming
                    .iter()
                    .filter(|(p, _)| self.is_link_predicate(p))
                    .map(|(_, s)| s.clone()),
            );
        }
        out.remove(x);
        out
    }

    /// The lexicographically smallest predicate linking `a` and `b`, in either direction.
    pub fn edge_predicate(&self, a: &EntityId, b: &EntityId) -> Option<&str> {
        let forward = self
            .link_pairs(a)
            .filter(|(_, o)| o.as_entity() == Some(b))
            .map(|(p, _)| p.as_str());
        let backward = self
            .link_pairs(b)
            .filter(|(_, o)| o.as_entity() == Some(a))
            .map(|(p, _)| p.as_str());
        forward.chain(backward).min()
    }

    pub fn kind_of(&self, e: &EntityId) -> EntityKind {
        self.classes.get(e).map(|c| c.kind).unwrap_or(EntityKind::Other)
    }

    /// Places the kind config marks as settlement-like (rendered as cities).
    pub fn is_settlement(&self, e: &EntityId) -> bool {
        self.classes.get(e).is_some_and(|c| c.settlement)
    }

    /// Display name: the first `rdfs:label` literal (untagged or English
    /// preferred), falling back to the decoded IRI local name.
    pub fn label(&self, e: &EntityId) -> String {
        let mut best: Option<&Literal> = None;
        for o in self.objects(e, RDFS_LABEL) {
            if let TripleObject::Literal(l) = o {
                let rank = |l: &Literal| match l.datatype.as_deref() {
                    None => 0,
                    Some("@en") => 1,
                    Some(_) => 2,
                };
                if best.is_none_or(|b| rank(l) < rank(b)) {
                    best = Some(l);
                }
            }
        }
        match best {
            Some(l) => l.value.clone(),
            None => e.readable_name(),
        }
    }

    /// First image reference found under the configured image predicates.
    pub fn image_ref(&self, e: &EntityId) -> Option<String> {
        self.kinds.image_predicates.iter().find_map(|p| {
            self.objects(e, p).next().map(|o| match o {
                TripleObject::Entity(x) => x.as_str().to_string(),
                TripleObject::Literal(l) => l.value.clone(),
            })
        })
    }
}

/// Readable rendering of a triple object.
pub fn object_label(graph: &KnowledgeGraph, o: &TripleObject) -> String {
    match o {
        TripleObject::Entity(e) => graph.label(e),
        TripleObject::Literal(l) => l.value.clone(),
    }
}
