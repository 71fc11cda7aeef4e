//! Solvability check that shares no code with [`super::apply`].
//!
//! The oracle explores greedily to a fixpoint: enter every reachable
//! building, exhaust every conversation and item in it, use keys as soon as
//! they are held. The game is solvable when this collects every fact about
//! the culprit and one of the culprit's statements contradicts them. The
//! actions it records form a winning playthrough.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::Action;
use crate::game::{
    BuildingId, CityId, ClueId, DialogNodeId, DialogTree, Effect, FactHolder, FactId, GameDefinition, ItemId, NpcRole,
    ObjectRef,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Playthrough {
    pub actions: Vec<Action>,
    /// Objects exploration never reveals.
    pub unreached: Vec<ObjectRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockedLock {
    pub building: BuildingId,
    pub key: Option<ItemId>,
    /// Where the key lies, if it exists.
    pub key_location: Option<BuildingId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnsolvableReport {
    pub reason: String,
    pub unreached: Vec<ObjectRef>,
    pub blocked_locks: Vec<BlockedLock>,
    /// Locked buildings whose keys lie, directly or transitively, behind
    /// their own locks. Each cycle starts and ends on the same building.
    pub key_cycles: Vec<Vec<BuildingId>>,
    pub missing_culprit_facts: Vec<FactId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleResult {
    Solvable(Playthrough),
    Unsolvable(UnsolvableReport),
}

impl OracleResult {
    pub fn is_solvable(&self) -> bool {
        matches!(self, OracleResult::Solvable(_))
    }
}

struct Explorer<'a> {
    def: &'a GameDefinition,
    city: CityId,
    inside: Option<BuildingId>,
    shown: BTreeSet<ObjectRef>,
    /// Buildings in the order they were first shown.
    queue: Vec<BuildingId>,
    done: BTreeSet<BuildingId>,
    keys: BTreeSet<ItemId>,
    opened: BTreeSet<BuildingId>,
    clues: BTreeSet<ClueId>,
    facts: BTreeSet<FactId>,
    actions: Vec<Action>,
}

impl<'a> Explorer<'a> {
    fn show(&mut self, r: &ObjectRef) {
        let def = self.def;
        let mut pending = VecDeque::from([r.clone()]);
        while let Some(r) = pending.pop_front() {
            if !self.shown.insert(r.clone()) {
                continue;
            }
            match &r {
                ObjectRef::City(c) => {
                    if let Some(l) = def.city(c).and_then(|c| c.buildings.first()) {
                        pending.push_back(ObjectRef::Building(l.clone()));
                    }
                }
                ObjectRef::Building(b) => {
                    self.queue.push(b.clone());
                    if let Some(b) = def.building(b) {
                        pending.push_back(ObjectRef::City(b.city.clone()));
                    }
                }
                ObjectRef::Npc(n) => {
                    if let Some(n) = def.npc(n) {
                        pending.push_back(ObjectRef::Building(n.building.clone()));
                    }
                }
                ObjectRef::Item(i) => {
                    if let Some(i) = def.item(i) {
                        pending.push_back(ObjectRef::Building(i.building.clone()));
                    }
                }
            }
        }
    }

    fn learn_clue(&mut self, c: &ClueId) {
        if self.clues.insert(c.clone()) {
            if let Some(clue) = self.def.clue(c) {
                let t = clue.target.clone();
                self.show(&t);
            }
        }
    }

    fn go_to_city(&mut self, c: &CityId) {
        if &self.city != c {
            self.actions.push(Action::TravelToCity { city: c.clone() });
            self.city = c.clone();
            self.inside = None;
        }
    }

    /// Opens and enters `b` if possible; returns whether it was explored.
    fn explore(&mut self, b: &BuildingId) -> bool {
        let def = self.def;
        let Some(building) = def.building(b) else { return false };
        if let Some(key) = &building.locked_by {
            if !self.opened.contains(b) {
                if !self.keys.contains(key) {
                    return false;
                }
                self.go_to_city(&building.city);
                self.actions.push(Action::UseKey {
                    key: key.clone(),
                    building: b.clone(),
                });
                self.keys.remove(key);
                self.opened.insert(b.clone());
            }
        }
        self.go_to_city(&building.city);
        if self.inside.as_ref() != Some(b) {
            self.actions.push(Action::EnterBuilding { building: b.clone() });
            self.inside = Some(b.clone());
        }
        for n in &building.occupants {
            self.show(&ObjectRef::Npc(n.clone()));
        }
        for i in &building.items {
            self.show(&ObjectRef::Item(i.clone()));
        }
        for n in &building.occupants {
            let Some(npc) = def.npc(n) else { continue };
            if npc.role == NpcRole::Suspect {
                continue;
            }
            let Some(tree) = npc.dialog_tree.as_ref().and_then(|t| def.dialog_tree(t)) else {
                continue;
            };
            for node in walk(tree) {
                self.actions.push(Action::TalkTo {
                    npc: n.clone(),
                    node: node.clone(),
                });
                for e in &tree.node(&node).expect("walk yields tree nodes").effects {
                    match e {
                        Effect::RevealClue(c) => self.learn_clue(c),
                        Effect::GrantFact(f) => {
                            self.facts.insert(f.clone());
                        }
                    }
                }
            }
        }
        for i in &building.items {
            let Some(item) = def.item(i) else { continue };
            self.actions.push(Action::InspectItem { item: i.clone() });
            if item.unlocks.is_some() {
                self.keys.insert(i.clone());
            }
            for c in &item.reveals {
                self.learn_clue(c);
            }
            for f in &def.facts {
                if f.holder == FactHolder::Item(i.clone()) {
                    self.facts.insert(f.id.clone());
                }
            }
        }
        true
    }
}

/// Visits every node reachable from the root, moving only from a node to
/// one of its children or restarting at the root.
pub fn walk(tree: &DialogTree) -> Vec<DialogNodeId> {
    let mut reachable = BTreeSet::from([tree.root.clone()]);
    let mut stack = vec![tree.root.clone()];
    while let Some(id) = stack.pop() {
        for c in tree.node(&id).map(|n| n.children.as_slice()).unwrap_or_default() {
            if reachable.insert(c.clone()) {
                stack.push(c.clone());
            }
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut at: Option<DialogNodeId> = None;
    while seen.len() < reachable.len() {
        let next = at.as_ref().and_then(|from| {
            // Shortest route from `from` to any unseen node.
            let mut prev: BTreeMap<DialogNodeId, DialogNodeId> = BTreeMap::new();
            let mut q = VecDeque::from([from.clone()]);
            let mut hit = None;
            while let Some(id) = q.pop_front() {
                if &id != from && !seen.contains(&id) {
                    hit = Some(id);
                    break;
                }
                for c in tree.node(&id).map(|n| n.children.as_slice()).unwrap_or_default() {
                    if c != from && !prev.contains_key(c) {
                        prev.insert(c.clone(), id.clone());
                        q.push_back(c.clone());
                    }
                }
            }
            hit.map(|h| {
                let mut route = vec![h.clone()];
                let mut cur = h;
                while let Some(p) = prev.get(&cur) {
                    if p == from {
                        break;
                    }
                    route.push(p.clone());
                    cur = p.clone();
                }
                route.reverse();
                route
            })
        });
        let route = next.unwrap_or_else(|| vec![tree.root.clone()]);
        for id in route {
            seen.insert(id.clone());
            at = Some(id.clone());
            out.push(id);
        }
    }
    out
}

pub fn solve(def: &GameDefinition) -> OracleResult {
    let mut x = Explorer {
        def,
        city: def.start_city.clone(),
        inside: Some(def.start_building.clone()),
        shown: BTreeSet::new(),
        queue: Vec::new(),
        done: BTreeSet::new(),
        keys: BTreeSet::new(),
        opened: BTreeSet::new(),
        clues: BTreeSet::new(),
        facts: BTreeSet::new(),
        actions: Vec::new(),
    };
    x.show(&ObjectRef::City(def.start_city.clone()));
    x.show(&ObjectRef::Building(def.start_building.clone()));
    // The start building comes first so that play begins where the player stands.
    x.queue.retain(|b| b != &def.start_building);
    x.queue.insert(0, def.start_building.clone());

    loop {
        let mut progress = false;
        let mut i = 0;
        while i < x.queue.len() {
            let b = x.queue[i].clone();
            i += 1;
            if x.done.contains(&b) {
                continue;
            }
            if x.explore(&b) {
                x.done.insert(b);
                progress = true;
            }
        }
        if !progress {
            break;
        }
    }

    let unreached = everything(def)
        .into_iter()
        .filter(|o| !x.shown.contains(o))
        .collect::<Vec<_>>();
    let culprit = def.npc(&def.culprit);
    let culprit_home = culprit.map(|c| c.building.clone());
    let missing: Vec<FactId> = def
        .facts
        .iter()
        .filter(|f| f.subject == def.culprit && !x.facts.contains(&f.id))
        .map(|f| f.id.clone())
        .collect();
    let lie = def.script(&def.culprit).and_then(|s| {
        s.statements.iter().position(|st| {
            def.facts.iter().any(|f| {
                f.subject == def.culprit
                    && x.facts.contains(&f.id)
                    && f.predicate_label == st.claim.predicate_label
                    && st.claim.value_label.as_ref() != Some(&f.value_label)
            })
        })
    });

    let reason = if !culprit_home.as_ref().is_some_and(|b| x.done.contains(b)) {
        Some("the culprit cannot be reached".to_string())
    } else if !missing.is_empty() {
        Some(format!(
            "{} fact(s) about the culprit cannot be collected",
            missing.len()
        ))
    } else if lie.is_none() {
        Some("no statement of the culprit is contradicted by a collectible fact".to_string())
    } else {
        None
    };
    if let Some(reason) = reason {
        let (blocked_locks, key_cycles) = blockage(def, &x.done);
        return OracleResult::Unsolvable(UnsolvableReport {
            reason,
            unreached,
            blocked_locks,
            key_cycles,
            missing_culprit_facts: missing,
        });
    }

    let home = culprit_home.expect("checked above");
    let home_city = def.building(&home).expect("validated").city.clone();
    x.go_to_city(&home_city);
    if x.inside.as_ref() != Some(&home) {
        x.actions.push(Action::EnterBuilding { building: home });
    }
    x.actions.push(Action::BeginInterrogation {
        suspect: def.culprit.clone(),
    });
    for _ in 0..lie.expect("checked above") {
        x.actions.push(Action::RespondOkay);
    }
    x.actions.push(Action::RespondWrong);
    x.actions.push(Action::Arrest);
    OracleResult::Solvable(Playthrough {
        actions: x.actions,
        unreached,
    })
}

fn everything(def: &GameDefinition) -> Vec<ObjectRef> {
    def.cities
        .iter()
        .map(|c| ObjectRef::City(c.id.clone()))
        .chain(def.buildings.iter().map(|b| ObjectRef::Building(b.id.clone())))
        .chain(def.npcs.iter().map(|n| ObjectRef::Npc(n.id.clone())))
        .chain(def.items.iter().map(|i| ObjectRef::Item(i.id.clone())))
        .collect()
}

fn blockage(def: &GameDefinition, done: &BTreeSet<BuildingId>) -> (Vec<BlockedLock>, Vec<Vec<BuildingId>>) {
    let mut blocked = Vec::new();
    let mut behind: BTreeMap<BuildingId, BuildingId> = BTreeMap::new();
    for b in &def.buildings {
        if done.contains(&b.id) || b.locked_by.is_none() {
            continue;
        }
        let key = b.locked_by.clone();
        let key_location = key.as_ref().and_then(|k| def.item(k)).map(|i| i.building.clone());
        if let Some(loc) = &key_location {
            behind.insert(b.id.clone(), loc.clone());
        }
        blocked.push(BlockedLock {
            building: b.id.clone(),
            key,
            key_location,
        });
    }
    let mut cycles = Vec::new();
    let mut claimed = BTreeSet::new();
    for start in behind.keys() {
        let mut path = vec![start.clone()];
        let mut cur = start.clone();
        while let Some(next) = behind.get(&cur) {
            if let Some(at) = path.iter().position(|p| p == next) {
                let mut cycle = path[at..].to_vec();
                if cycle.iter().all(|b| !claimed.contains(b)) {
                    claimed.extend(cycle.iter().cloned());
                    cycle.push(next.clone());
                    cycles.push(cycle);
                }
                break;
            }
            path.push(next.clone());
            cur = next.clone();
        }
    }
    (blocked, cycles)
}
