//! Deterministic play of a [`GameDefinition`].
//!
//! The player starts inside the victim's house. Clues reveal objects:
//! a city reveals itself and its landmark, a building reveals itself and
//! its city, and an NPC or item reveals itself, its building and its city.
//! Entering a building reveals everyone and everything in it.

pub mod oracle;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{
    BuildingId, CityId, ClueId, DialogNodeId, Effect, FactHolder, FactId, GameDefinition, ItemId, ItemKind, NpcId,
    NpcRole, ObjectRef,
};

pub use validate::{validate, validate_with_oracle, Violation};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    TravelToCity { city: CityId },
    EnterBuilding { building: BuildingId },
    UseKey { key: ItemId, building: BuildingId },
    InspectItem { item: ItemId },
    TalkTo { npc: NpcId, node: DialogNodeId },
    BeginInterrogation { suspect: NpcId },
    RespondOkay,
    RespondWrong,
    Arrest,
    DeclineArrest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ongoing,
    Won,
    Lost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    CityVisited { city: CityId },
    BuildingEntered { building: BuildingId },
    ItemInspected { item: ItemId },
    NpcTalked { npc: NpcId, node: DialogNodeId },
    ClueRevealed { clue: ClueId, target: ObjectRef },
    FactLearned { fact: FactId },
    KeyUsed { key: ItemId, building: BuildingId },
    StatementHeard { suspect: NpcId, index: usize },
    GameEnded { outcome: Outcome, arrested: NpcId },
}

/// An event stamped with the number of the action that caused it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub step: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DialogPosition {
    pub npc: NpcId,
    pub node: DialogNodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interrogation {
    pub suspect: NpcId,
    pub statement: usize,
    /// Set after "You are Wrong!"; only Arrest or DeclineArrest follow.
    pub awaiting_arrest: bool,
}

/// Live play state. Journal maps are keyed by object id and hold the
/// entry's explored flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub current_city: CityId,
    pub current_building: Option<BuildingId>,
    pub dialog: Option<DialogPosition>,
    pub revealed: BTreeSet<ObjectRef>,
    pub journal_people: BTreeMap<NpcId, bool>,
    pub journal_places: BTreeMap<String, bool>,
    pub journal_objects: BTreeMap<ItemId, bool>,
    pub activity_log: Vec<EventRecord>,
    pub inventory: BTreeSet<ItemId>,
    pub consumed: BTreeSet<ItemId>,
    pub known_facts: BTreeSet<FactId>,
    pub revealed_clues: BTreeSet<ClueId>,
    pub unlocked: BTreeSet<BuildingId>,
    pub visited_cities: BTreeSet<CityId>,
    pub entered: BTreeSet<BuildingId>,
    pub inspected: BTreeSet<ItemId>,
    pub visited_nodes: BTreeSet<DialogNodeId>,
    /// Highest statement index heard per suspect.
    pub heard: BTreeMap<NpcId, usize>,
    pub interrogation: Option<Interrogation>,
    pub outcome: Outcome,
    pub arrested: Option<NpcId>,
    pub step: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid game definition: {}", .0.iter().map(|v| v.code.as_str()).collect::<Vec<_>>().join(", "))]
    Validation(Vec<Violation>),
    #[error("illegal action {action:?}")]
    IllegalAction { action: Action },
}

fn is_locked(def: &GameDefinition, state: &GameState, b: &BuildingId) -> bool {
    def.building(b).is_some_and(|x| x.locked_by.is_some()) && !state.unlocked.contains(b)
}

impl GameState {
    pub fn is_revealed(&self, r: &ObjectRef) -> bool {
        self.revealed.contains(r)
    }

    fn reveal(&mut self, def: &GameDefinition, r: ObjectRef) {
        let also = match &r {
            ObjectRef::City(c) => def
                .city(c)
                .and_then(|c| c.buildings.first())
                .map(|b| ObjectRef::Building(b.clone())),
            ObjectRef::Building(b) => def.building(b).map(|b| ObjectRef::City(b.city.clone())),
            ObjectRef::Npc(n) => def.npc(n).map(|n| ObjectRef::Building(n.building.clone())),
            ObjectRef::Item(i) => def.item(i).map(|i| ObjectRef::Building(i.building.clone())),
        };
        if self.revealed.insert(r.clone()) {
            match &r {
                ObjectRef::City(c) => {
                    self.journal_places.entry(c.to_string()).or_insert(false);
                }
                ObjectRef::Building(b) => {
                    self.journal_places.entry(b.to_string()).or_insert(false);
                }
                ObjectRef::Npc(n) => {
                    self.journal_people.entry(n.clone()).or_insert(false);
                }
                ObjectRef::Item(i) => {
                    self.journal_objects.entry(i.clone()).or_insert(false);
                }
            }
        }
        if let Some(next) = also {
            if !self.revealed.contains(&next) {
                self.reveal(def, next);
            }
        }
    }

    fn enter(&mut self, def: &GameDefinition, b: &BuildingId) {
        self.current_building = Some(b.clone());
        self.dialog = None;
        self.entered.insert(b.clone());
        if let Some(building) = def.building(b) {
            for n in &building.occupants {
                self.reveal(def, ObjectRef::Npc(n.clone()));
            }
            for i in &building.items {
                if !self.consumed.contains(i) {
                    self.reveal(def, ObjectRef::Item(i.clone()));
                }
            }
        }
    }

    fn npc_explored(&self, def: &GameDefinition, n: &NpcId) -> bool {
        match def.npc(n) {
            Some(npc) if npc.role == NpcRole::Suspect => {
                let len = def.script(n).map_or(0, |s| s.statements.len());
                self.heard.get(n).is_some_and(|&h| h + 1 >= len)
            }
            Some(_) => def
                .tree_of(n)
                .is_some_and(|t| t.nodes.iter().all(|x| self.visited_nodes.contains(&x.id))),
            None => false,
        }
    }

    fn item_explored(&self, i: &ItemId) -> bool {
        self.inspected.contains(i) || self.consumed.contains(i)
    }

    fn building_explored(&self, def: &GameDefinition, b: &BuildingId) -> bool {
        self.entered.contains(b)
            && def.building(b).is_some_and(|x| {
                x.occupants.iter().all(|n| self.npc_explored(def, n)) && x.items.iter().all(|i| self.item_explored(i))
            })
    }

    fn refresh_journal(&mut self, def: &GameDefinition) {
        let people: Vec<NpcId> = self.journal_people.keys().cloned().collect();
        for n in people {
            let v = self.npc_explored(def, &n);
            self.journal_people.insert(n, v);
        }
        let objects: Vec<ItemId> = self.journal_objects.keys().cloned().collect();
        for i in objects {
            let v = self.item_explored(&i);
            self.journal_objects.insert(i, v);
        }
        let places: Vec<String> = self.journal_places.keys().cloned().collect();
        for p in places {
            let v = if let Some(c) = def.city(&CityId(p.clone())) {
                self.visited_cities.contains(&c.id)
                    && c.buildings
                        .iter()
                        .filter(|b| self.revealed.contains(&ObjectRef::Building((*b).clone())))
                        .all(|b| self.building_explored(def, b))
            } else {
                self.building_explored(def, &BuildingId(p.clone()))
            };
            self.journal_places.insert(p, v);
        }
    }

    /// Suspect locations the player has uncovered.
    pub fn known_whereabouts(&self, def: &GameDefinition, suspect: &NpcId) -> Option<BuildingId> {
        if !self.revealed.contains(&ObjectRef::Npc(suspect.clone())) {
            return None;
        }
        def.npc(suspect).map(|n| n.building.clone())
    }
}

/// Starting state, inside the victim's house with the start city and its
/// landmark revealed.
pub fn new_game(def: &GameDefinition) -> Result<GameState, EngineError> {
    let violations = validate(def);
    if !violations.is_empty() {
        return Err(EngineError::Validation(violations));
    }
    let mut s = GameState {
        current_city: def.start_city.clone(),
        current_building: None,
        dialog: None,
        revealed: BTreeSet::new(),
        journal_people: BTreeMap::new(),
        journal_places: BTreeMap::new(),
        journal_objects: BTreeMap::new(),
        activity_log: Vec::new(),
        inventory: BTreeSet::new(),
        consumed: BTreeSet::new(),
        known_facts: BTreeSet::new(),
        revealed_clues: BTreeSet::new(),
        unlocked: BTreeSet::new(),
        visited_cities: BTreeSet::from([def.start_city.clone()]),
        entered: BTreeSet::new(),
        inspected: BTreeSet::new(),
        visited_nodes: BTreeSet::new(),
        heard: BTreeMap::new(),
        interrogation: None,
        outcome: Outcome::Ongoing,
        arrested: None,
        step: 0,
    };
    s.reveal(def, ObjectRef::City(def.start_city.clone()));
    s.reveal(def, ObjectRef::Building(def.start_building.clone()));
    s.enter(def, &def.start_building);
    s.refresh_journal(def);
    Ok(s)
}

pub fn legal_actions(state: &GameState, def: &GameDefinition) -> Vec<Action> {
    if state.outcome != Outcome::Ongoing {
        return Vec::new();
    }
    if let Some(i) = &state.interrogation {
        return if i.awaiting_arrest {
            vec![Action::Arrest, Action::DeclineArrest]
        } else {
            vec![Action::RespondOkay, Action::RespondWrong]
        };
    }
    let mut out = Vec::new();
    for c in &def.cities {
        if state.is_revealed(&ObjectRef::City(c.id.clone()))
            && (c.id != state.current_city || state.current_building.is_some())
        {
            out.push(Action::TravelToCity { city: c.id.clone() });
        }
    }
    let here: Vec<&crate::game::Building> = def
        .buildings
        .iter()
        .filter(|b| b.city == state.current_city && state.is_revealed(&ObjectRef::Building(b.id.clone())))
        .collect();
    for b in &here {
        if state.current_building.as_ref() != Some(&b.id) && !is_locked(def, state, &b.id) {
            out.push(Action::EnterBuilding { building: b.id.clone() });
        }
    }
    for b in &here {
        if let Some(key) = &b.locked_by {
            if is_locked(def, state, &b.id) && state.inventory.contains(key) {
                out.push(Action::UseKey {
                    key: key.clone(),
                    building: b.id.clone(),
                });
            }
        }
    }
    let mut inspectable: BTreeSet<ItemId> = state.inventory.clone();
    if let Some(cur) = state.current_building.as_ref().and_then(|b| def.building(b)) {
        for i in &cur.items {
            if state.is_revealed(&ObjectRef::Item(i.clone())) && !state.consumed.contains(i) {
                inspectable.insert(i.clone());
            }
        }
        out.extend(inspectable.into_iter().map(|item| Action::InspectItem { item }));

        let mut talk = Vec::new();
        if let Some(pos) = &state.dialog {
            if let Some(node) = def.tree_of(&pos.npc).and_then(|t| t.node(&pos.node)) {
                for child in &node.children {
                    talk.push(Action::TalkTo {
                        npc: pos.npc.clone(),
                        node: child.clone(),
                    });
                }
            }
        }
        for n in &cur.occupants {
            let Some(npc) = def.npc(n) else { continue };
            if !state.is_revealed(&ObjectRef::Npc(n.clone())) {
                continue;
            }
            match npc.role {
                NpcRole::Regular => {
                    if let Some(t) = def.tree_of(n) {
                        let a = Action::TalkTo {
                            npc: n.clone(),
                            node: t.root.clone(),
                        };
                        if !talk.contains(&a) {
                            talk.push(a);
                        }
                    }
                }
                NpcRole::Suspect => out.push(Action::BeginInterrogation { suspect: n.clone() }),
            }
        }
        out.extend(talk);
    } else {
        out.extend(inspectable.into_iter().map(|item| Action::InspectItem { item }));
    }
    out
}

/// The state after `action`, and the events it produced. Illegal actions
/// leave the state untouched.
pub fn apply(state: &GameState, action: &Action, def: &GameDefinition) -> Result<(GameState, Vec<Event>), EngineError> {
    if !legal_actions(state, def).contains(action) {
        return Err(EngineError::IllegalAction { action: action.clone() });
    }
    let mut s = state.clone();
    let mut events = Vec::new();
    match action {
        Action::TravelToCity { city } => {
            s.current_city = city.clone();
            s.current_building = None;
            s.dialog = None;
            s.visited_cities.insert(city.clone());
            events.push(Event::CityVisited { city: city.clone() });
        }
        Action::EnterBuilding { building } => {
            s.enter(def, building);
            events.push(Event::BuildingEntered {
                building: building.clone(),
            });
        }
        Action::UseKey { key, building } => {
            s.inventory.remove(key);
            s.consumed.insert(key.clone());
            s.unlocked.insert(building.clone());
            events.push(Event::KeyUsed {
                key: key.clone(),
                building: building.clone(),
            });
        }
        Action::InspectItem { item } => {
            s.inspected.insert(item.clone());
            s.inventory.insert(item.clone());
            events.push(Event::ItemInspected { item: item.clone() });
            let it = def.item(item).expect("legal items exist");
            for c in &it.reveals {
                reveal_clue(&mut s, def, c, &mut events);
            }
            for f in def.facts_held_by(&FactHolder::Item(item.clone())) {
                learn_fact(&mut s, &f.id, &mut events);
            }
        }
        Action::TalkTo { npc, node } => {
            s.dialog = Some(DialogPosition {
                npc: npc.clone(),
                node: node.clone(),
            });
            s.visited_nodes.insert(node.clone());
            events.push(Event::NpcTalked {
                npc: npc.clone(),
                node: node.clone(),
            });
            let n = def.tree_of(npc).and_then(|t| t.node(node)).expect("legal nodes exist");
            for e in &n.effects {
                match e {
                    Effect::RevealClue(c) => reveal_clue(&mut s, def, c, &mut events),
                    Effect::GrantFact(f) => learn_fact(&mut s, f, &mut events),
                }
            }
        }
        Action::BeginInterrogation { suspect } => {
            s.dialog = None;
            s.interrogation = Some(Interrogation {
                suspect: suspect.clone(),
                statement: 0,
                awaiting_arrest: false,
            });
            hear(&mut s, suspect, 0, &mut events);
        }
        Action::RespondOkay => {
            let i = s.interrogation.clone().expect("legal only mid-interrogation");
            let len = def.script(&i.suspect).map_or(0, |x| x.statements.len());
            if i.statement + 1 < len {
                s.interrogation = Some(Interrogation {
                    statement: i.statement + 1,
                    ..i.clone()
                });
                hear(&mut s, &i.suspect, i.statement + 1, &mut events);
            } else {
                s.interrogation = None;
            }
        }
        Action::RespondWrong => {
            if let Some(i) = s.interrogation.as_mut() {
                i.awaiting_arrest = true;
            }
        }
        Action::Arrest => {
            let i = s.interrogation.take().expect("legal only mid-interrogation");
            s.outcome = if i.suspect == def.culprit {
                Outcome::Won
            } else {
                Outcome::Lost
            };
            s.arrested = Some(i.suspect.clone());
            events.push(Event::GameEnded {
                outcome: s.outcome,
                arrested: i.suspect,
            });
        }
        Action::DeclineArrest => {
            s.interrogation = None;
        }
    }
    s.step += 1;
    let step = s.step;
    s.activity_log
        .extend(events.iter().cloned().map(|event| EventRecord { step, event }));
    s.refresh_journal(def);
    Ok((s, events))
}

fn reveal_clue(s: &mut GameState, def: &GameDefinition, c: &ClueId, events: &mut Vec<Event>) {
    if !s.revealed_clues.insert(c.clone()) {
        return;
    }
    let target = def.clue(c).expect("clues exist").target.clone();
    s.reveal(def, target.clone());
    events.push(Event::ClueRevealed {
        clue: c.clone(),
        target,
    });
}

fn learn_fact(s: &mut GameState, f: &FactId, events: &mut Vec<Event>) {
    if s.known_facts.insert(f.clone()) {
        events.push(Event::FactLearned { fact: f.clone() });
    }
}

fn hear(s: &mut GameState, suspect: &NpcId, index: usize, events: &mut Vec<Event>) {
    let best = s.heard.entry(suspect.clone()).or_insert(index);
    *best = (*best).max(index);
    events.push(Event::StatementHeard {
        suspect: suspect.clone(),
        index,
    });
}

/// Plays `actions` from the start, stopping at the first illegal one.
pub fn replay(def: &GameDefinition, actions: &[Action]) -> Result<GameState, EngineError> {
    let mut s = new_game(def)?;
    for a in actions {
        s = apply(&s, a, def)?.0;
    }
    Ok(s)
}

/// One JSON object per line.
pub fn events_ndjson(log: &[EventRecord]) -> String {
    let mut out = String::new();
    for r in log {
        out.push_str(&serde_json::to_string(r).expect("events serialize"));
        out.push('\n');
    }
    out
}

/// Whether a key item is still usable by the player.
pub fn key_in_hand(state: &GameState, def: &GameDefinition, key: &ItemId) -> bool {
    state.inventory.contains(key) && def.item(key).is_some_and(|i| i.kind == ItemKind::Key)
}
