use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::EntityKind;

const DEFAULT_KINDS: &str = include_str!("../../data/kinds.toml");

#[derive(Debug, Error)]
pub enum KindConfigError {
    #[error("reading kind config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing kind config: {0}")]
    Parse(#[from] toml::de::Error),
}

/// What a matching rule resolves an entity to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Person,
    /// A place rendered as a city.
    Settlement,
    /// A place rendered as a building.
    Place,
    Other,
}

impl RuleKind {
    pub fn entity_kind(self) -> EntityKind {
        match self {
            RuleKind::Person => EntityKind::Person,
            RuleKind::Settlement | RuleKind::Place => EntityKind::Place,
            RuleKind::Other => EntityKind::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindRule {
    pub predicate: String,
    pub class: String,
    pub kind: RuleKind,
}

/// Ordered typing rules; the first rule matching any of an entity's triples wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindConfig {
    #[serde(default, rename = "rule")]
    pub rules: Vec<KindRule>,
    /// Predicates that describe an entity without linking it to others.
    #[serde(default)]
    pub metadata_predicates: Vec<String>,
    /// Predicates whose objects are portrait/image references.
    #[serde(default)]
    pub image_predicates: Vec<String>,
    #[serde(skip)]
    metadata_cache: BTreeSet<String>,
}

impl KindConfig {
    pub fn new(rules: Vec<KindRule>, metadata_predicates: Vec<String>, image_predicates: Vec<String>) -> Self {
        KindConfig {
            rules,
            metadata_predicates,
            image_predicates,
            metadata_cache: BTreeSet::new(),
        }
        .indexed()
    }

    pub fn from_toml(text: &str) -> Result<Self, KindConfigError> {
        let cfg: KindConfig = toml::from_str(text)?;
        Ok(cfg.indexed())
    }

    pub fn load(path: &Path) -> Result<Self, KindConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| KindConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    fn indexed(mut self) -> Self {
        self.metadata_cache = self
            .rules
            .iter()
            .map(|r| r.predicate.clone())
            .chain(self.metadata_predicates.iter().cloned())
            .chain(self.image_predicates.iter().cloned())
            .collect();
        self
    }

    pub fn is_metadata(&self, predicate: &str) -> bool {
        self.metadata_cache.contains(predicate)
    }
}

impl Default for KindConfig {
    fn default() -> Self {
        Self::from_toml(DEFAULT_KINDS).expect("bundled kind config parses")
    }
}
