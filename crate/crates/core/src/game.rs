//! The generated adventure: a self-contained document that the engine plays
//! and the service hands to clients. Serialized as JSON with
//! `schema_version` "1".

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::EntityId;

pub const SCHEMA_VERSION: &str = "1";

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident, $prefix:literal) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub const PREFIX: &'static str = $prefix;

            pub fn numbered(n: usize) -> Self {
                Self(format!("{}-{}", $prefix, n))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }
    };
}

id_type!(CityId, "city");
id_type!(BuildingId, "bldg");
id_type!(NpcId, "npc");
id_type!(ItemId, "item");
id_type!(ClueId, "clue");
id_type!(FactId, "fact");
id_type!(DialogTreeId, "dlg");
id_type!(
    /// Unique across the whole game, not only within its tree.
    DialogNodeId,
    "node"
);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum ObjectRef {
    City(CityId),
    Building(BuildingId),
    Npc(NpcId),
    Item(ItemId),
}

impl ObjectRef {
    pub fn id_str(&self) -> &str {
        match self {
            ObjectRef::City(id) => id.as_str(),
            ObjectRef::Building(id) => id.as_str(),
            ObjectRef::Npc(id) => id.as_str(),
            ObjectRef::Item(id) => id.as_str(),
        }
    }
}

impl fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct City {
    pub id: CityId,
    pub display_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_entity: Option<EntityId>,
    pub description: String,
    /// The first entry is the city's public landmark, revealed with the city.
    pub buildings: Vec<BuildingId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Building {
    pub id: BuildingId,
    pub display_name: String,
    pub city: CityId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_entity: Option<EntityId>,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locked_by: Option<ItemId>,
    pub occupants: Vec<NpcId>,
    pub items: Vec<ItemId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NpcRole {
    Regular,
    Suspect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Npc {
    pub id: NpcId,
    pub display_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_entity: Option<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub portrait_ref: Option<String>,
    pub role: NpcRole,
    pub building: BuildingId,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dialog_tree: Option<DialogTreeId>,
    pub facts_held: Vec<FactId>,
    pub clues_held: Vec<ClueId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    Book,
    Letter,
    Photograph,
    Key,
}

impl ItemKind {
    pub fn noun(self) -> &'static str {
        match self {
            ItemKind::Book => "book",
            ItemKind::Letter => "letter",
            ItemKind::Photograph => "photograph",
            ItemKind::Key => "key",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    pub display_name: String,
    pub kind: ItemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_entity: Option<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_ref: Option<String>,
    pub description: String,
    pub building: BuildingId,
    /// Clues revealed on inspection. More than one only when the source
    /// entity lies on several suspects' paths.
    pub reveals: Vec<ClueId>,
    /// Set for key items only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unlocks: Option<BuildingId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clue {
    pub id: ClueId,
    pub target: ObjectRef,
    pub source_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum FactHolder {
    Npc(NpcId),
    Item(ItemId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub id: FactId,
    pub subject: NpcId,
    pub predicate: String,
    pub predicate_label: String,
    pub value_label: String,
    pub truthful: bool,
    pub holder: FactHolder,
}

impl Fact {
    /// Journal form, e.g. "notableStudent: Max Delbrück".
    pub fn summary(&self) -> String {
        format!("{}: {}", self.predicate_label, self.value_label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub predicate_label: String,
    /// `None` for a denial ("I do not have any ...").
    pub value_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub text: String,
    pub truthful: bool,
    pub claim: Claim,
    /// The fact this statement was rendered from. For the culprit's false
    /// statement this is the other suspect's fact.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_fact: Option<FactId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterrogationScript {
    pub suspect: NpcId,
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    Player,
    Npc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Essential,
    FactGiving,
    Flair,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "id", rename_all = "snake_case")]
pub enum Effect {
    RevealClue(ClueId),
    GrantFact(FactId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogNode {
    pub id: DialogNodeId,
    pub speaker: Speaker,
    pub text: String,
    pub tier: Tier,
    /// Branch responses point back at the hub, so the structure is a tree
    /// plus return edges.
    pub children: Vec<DialogNodeId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub effects: Vec<Effect>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogTree {
    pub id: DialogTreeId,
    pub npc: NpcId,
    pub root: DialogNodeId,
    pub hub: DialogNodeId,
    pub nodes: Vec<DialogNode>,
}

impl DialogTree {
    pub fn node(&self, id: &DialogNodeId) -> Option<&DialogNode> {
        self.nodes.iter().find(|n| &n.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameDefinition {
    pub schema_version: String,
    pub title: String,
    pub victim_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victim_entity: Option<EntityId>,
    pub backstory: Vec<String>,
    pub suspects: Vec<NpcId>,
    pub culprit: NpcId,
    pub cities: Vec<City>,
    pub buildings: Vec<Building>,
    pub npcs: Vec<Npc>,
    pub items: Vec<Item>,
    pub clues: Vec<Clue>,
    pub facts: Vec<Fact>,
    pub dialog_trees: Vec<DialogTree>,
    pub interrogation_scripts: Vec<InterrogationScript>,
    pub start_city: CityId,
    pub start_building: BuildingId,
    pub rng_seed: u64,
}

#[derive(Debug, Error)]
pub enum GameFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is not a valid game file: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl GameDefinition {
    pub fn city(&self, id: &CityId) -> Option<&City> {
        self.cities.iter().find(|c| &c.id == id)
    }

    pub fn building(&self, id: &BuildingId) -> Option<&Building> {
        self.buildings.iter().find(|b| &b.id == id)
    }

    pub fn npc(&self, id: &NpcId) -> Option<&Npc> {
        self.npcs.iter().find(|n| &n.id == id)
    }

    pub fn item(&self, id: &ItemId) -> Option<&Item> {
        self.items.iter().find(|i| &i.id == id)
    }

    pub fn clue(&self, id: &ClueId) -> Option<&Clue> {
        self.clues.iter().find(|c| &c.id == id)
    }

    pub fn fact(&self, id: &FactId) -> Option<&Fact> {
        self.facts.iter().find(|f| &f.id == id)
    }

    pub fn dialog_tree(&self, id: &DialogTreeId) -> Option<&DialogTree> {
        self.dialog_trees.iter().find(|t| &t.id == id)
    }

    pub fn tree_of(&self, npc: &NpcId) -> Option<&DialogTree> {
        self.npc(npc)
            .and_then(|n| n.dialog_tree.as_ref())
            .and_then(|t| self.dialog_tree(t))
    }

    pub fn script(&self, suspect: &NpcId) -> Option<&InterrogationScript> {
        self.interrogation_scripts.iter().find(|s| &s.suspect == suspect)
    }

    pub fn is_suspect(&self, npc: &NpcId) -> bool {
        self.suspects.contains(npc)
    }

    pub fn facts_about<'a>(&'a self, suspect: &'a NpcId) -> impl Iterator<Item = &'a Fact> + 'a {
        self.facts.iter().filter(move |f| &f.subject == suspect)
    }

    pub fn facts_held_by<'a>(&'a self, holder: &'a FactHolder) -> impl Iterator<Item = &'a Fact> + 'a {
        self.facts.iter().filter(move |f| &f.holder == holder)
    }

    pub fn display_name(&self, r: &ObjectRef) -> Option<&str> {
        match r {
            ObjectRef::City(id) => self.city(id).map(|c| c.display_name.as_str()),
            ObjectRef::Building(id) => self.building(id).map(|b| b.display_name.as_str()),
            ObjectRef::Npc(id) => self.npc(id).map(|n| n.display_name.as_str()),
            ObjectRef::Item(id) => self.item(id).map(|i| i.display_name.as_str()),
        }
    }

    /// Canonical serialized form. Identical games give identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("game definitions serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn load(path: &Path) -> Result<Self, GameFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| GameFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| GameFileError::Json {
            path: path.display().to_string(),
            source,
        })
    }
}
