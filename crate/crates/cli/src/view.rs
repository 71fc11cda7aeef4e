//! The client-facing projection of a session: everything the play screen
//! renders, computed from the definition and the current state alone.

use mystery_core::engine::{legal_actions, Action, Event, EventRecord, GameState, Outcome};
use mystery_core::game::{BuildingId, CityId, GameDefinition, ItemId, ItemKind, NpcId, NpcRole, ObjectRef, Speaker};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewState {
    pub title: String,
    pub victim_name: String,
    pub backstory: Vec<String>,
    pub step: u64,
    pub outcome: Outcome,
    pub display: Display,
    /// What the description panel shows without any selection.
    pub description_panel: Description,
    /// Panel contents for every object the player may select.
    pub descriptions: Vec<Description>,
    pub journal: Journal,
    pub activity: Vec<ActivityEntry>,
    pub overview: Overview,
    pub interrogation: Option<InterrogationView>,
    pub ending: Option<Ending>,
    pub legal_actions: Vec<Action>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scene {
    CityMap,
    Building,
    Dialog,
    Interrogation,
    Ended,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Named {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapCity {
    pub id: CityId,
    pub name: String,
    pub current: bool,
    pub visited: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapBuilding {
    pub id: BuildingId,
    pub name: String,
    pub locked: bool,
    pub entered: bool,
    pub current: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Figure {
    pub id: NpcId,
    pub name: String,
    pub portrait_ref: Option<String>,
    pub suspect: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemView {
    pub id: ItemId,
    pub name: String,
    pub kind: ItemKind,
    pub image_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DialogOption {
    pub node: String,
    pub speaker: Speaker,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DialogView {
    pub npc: NpcId,
    pub npc_name: String,
    pub speaker: Speaker,
    pub text: String,
    pub options: Vec<DialogOption>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Display {
    pub scene: Scene,
    pub city: Named,
    pub building: Option<Named>,
    /// Revealed cities, for the travel map.
    pub cities: Vec<MapCity>,
    /// Revealed buildings of the current city.
    pub buildings: Vec<MapBuilding>,
    /// Revealed people in the current building.
    pub npcs: Vec<Figure>,
    /// Items lying in the current building.
    pub items: Vec<ItemView>,
    pub dialog: Option<DialogView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Description {
    pub object: ObjectRef,
    pub name: String,
    pub text: String,
    pub image_ref: Option<String>,
    /// Known facts, for suspects.
    pub facts: Vec<String>,
    pub whereabouts: Option<Whereabouts>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Whereabouts {
    pub building: BuildingId,
    pub building_name: String,
    pub city: CityId,
    pub city_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JournalEntry {
    pub id: String,
    pub name: String,
    pub explored: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Journal {
    pub people: Vec<JournalEntry>,
    pub places: Vec<JournalEntry>,
    pub objects: Vec<JournalEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActivityEntry {
    pub step: u64,
    pub text: String,
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuspectView {
    pub id: NpcId,
    pub name: String,
    pub known_facts: Vec<String>,
    pub whereabouts: Option<Whereabouts>,
    pub statements_heard: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Overview {
    pub suspects: Vec<SuspectView>,
    pub inventory: Vec<ItemView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterrogationView {
    pub suspect: NpcId,
    pub suspect_name: String,
    pub statement_index: usize,
    pub statement_count: usize,
    pub text: String,
    pub awaiting_arrest: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ending {
    pub outcome: Outcome,
    pub arrested: NpcId,
    pub arrested_name: String,
    pub message: String,
}

fn name_of(def: &GameDefinition, r: &ObjectRef) -> String {
    def.display_name(r).unwrap_or(r.id_str()).to_string()
}

fn item_view(def: &GameDefinition, id: &ItemId) -> Option<ItemView> {
    def.item(id).map(|i| ItemView {
        id: i.id.clone(),
        name: i.display_name.clone(),
        kind: i.kind,
        image_ref: i.image_ref.clone(),
    })
}

fn whereabouts(def: &GameDefinition, state: &GameState, suspect: &NpcId) -> Option<Whereabouts> {
    let b = def.building(&state.known_whereabouts(def, suspect)?)?;
    let c = def.city(&b.city)?;
    Some(Whereabouts {
        building: b.id.clone(),
        building_name: b.display_name.clone(),
        city: c.id.clone(),
        city_name: c.display_name.clone(),
    })
}

fn known_facts(def: &GameDefinition, state: &GameState, suspect: &NpcId) -> Vec<String> {
    def.facts_about(suspect)
        .filter(|f| state.known_facts.contains(&f.id))
        .map(|f| f.summary())
        .collect()
}

fn describe(def: &GameDefinition, state: &GameState, r: &ObjectRef) -> Description {
    let (text, image_ref) = match r {
        ObjectRef::City(id) => (def.city(id).map(|c| c.description.clone()), None),
        ObjectRef::Building(id) => (def.building(id).map(|b| b.description.clone()), None),
        ObjectRef::Npc(id) => {
            let n = def.npc(id);
            (n.map(|n| n.description.clone()), n.and_then(|n| n.portrait_ref.clone()))
        }
        ObjectRef::Item(id) => {
            let i = def.item(id);
            (i.map(|i| i.description.clone()), i.and_then(|i| i.image_ref.clone()))
        }
    };
    let (facts, where_) = match r {
        ObjectRef::Npc(id) if def.is_suspect(id) => (known_facts(def, state, id), whereabouts(def, state, id)),
        _ => (Vec::new(), None),
    };
    Description {
        object: r.clone(),
        name: name_of(def, r),
        text: text.unwrap_or_default(),
        image_ref,
        facts,
        whereabouts: where_,
    }
}

/// One line of the activity tab.
pub fn activity_text(def: &GameDefinition, event: &Event) -> String {
    let npc = |id: &NpcId| name_of(def, &ObjectRef::Npc(id.clone()));
    let item = |id: &ItemId| name_of(def, &ObjectRef::Item(id.clone()));
    let building = |id: &BuildingId| name_of(def, &ObjectRef::Building(id.clone()));
    match event {
        Event::CityVisited { city } => format!("Travelled to {}", name_of(def, &ObjectRef::City(city.clone()))),
        Event::BuildingEntered { building: b } => format!("Entered {}", building(b)),
        Event::ItemInspected { item: i } => format!("Inspected {}", item(i)),
        Event::NpcTalked { npc: n, node } => {
            let line = def.tree_of(n).and_then(|t| t.node(node));
            match line {
                Some(l) if l.speaker == Speaker::Player => format!("You to {}: \"{}\"", npc(n), l.text),
                Some(l) => format!("{}: \"{}\"", npc(n), l.text),
                None => format!("Talked to {}", npc(n)),
            }
        }
        Event::ClueRevealed { target, .. } => format!("New lead: {}", name_of(def, target)),
        Event::FactLearned { fact } => match def.fact(fact) {
            Some(f) => format!("Learned about {}: {}", npc(&f.subject), f.summary()),
            None => format!("Learned {fact}"),
        },
        Event::KeyUsed { key, building: b } => format!("Unlocked {} with {}", building(b), item(key)),
        Event::StatementHeard { suspect, index } => {
            let text = def
                .script(suspect)
                .and_then(|s| s.statements.get(*index))
                .map_or("", |s| s.text.as_str());
            format!("{}: \"{}\"", npc(suspect), text)
        }
        Event::GameEnded { outcome, arrested } => match outcome {
            Outcome::Won => format!("Arrested {}. The case is closed.", npc(arrested)),
            _ => format!("Arrested {}, who was innocent.", npc(arrested)),
        },
    }
}

fn journal_entries<K: AsRef<str>>(
    def: &GameDefinition,
    entries: impl Iterator<Item = (K, bool)>,
    to_ref: impl Fn(&str) -> ObjectRef,
) -> Vec<JournalEntry> {
    entries
        .map(|(id, explored)| {
            let id = id.as_ref();
            JournalEntry {
                id: id.to_string(),
                name: name_of(def, &to_ref(id)),
                explored,
            }
        })
        .collect()
}

fn place_ref(id: &str) -> ObjectRef {
    if id.starts_with(CityId::PREFIX) {
        ObjectRef::City(id.into())
    } else {
        ObjectRef::Building(id.into())
    }
}

pub fn view_state(def: &GameDefinition, state: &GameState) -> ViewState {
    let city = def.city(&state.current_city);
    let building = state.current_building.as_ref().and_then(|b| def.building(b));

    let scene = if state.outcome != Outcome::Ongoing {
        Scene::Ended
    } else if state.interrogation.is_some() {
        Scene::Interrogation
    } else if state.dialog.is_some() {
        Scene::Dialog
    } else if building.is_some() {
        Scene::Building
    } else {
        Scene::CityMap
    };

    let cities = def
        .cities
        .iter()
        .filter(|c| state.is_revealed(&ObjectRef::City(c.id.clone())))
        .map(|c| MapCity {
            id: c.id.clone(),
            name: c.display_name.clone(),
            current: c.id == state.current_city,
            visited: state.visited_cities.contains(&c.id),
        })
        .collect();
    let buildings = city
        .map(|c| {
            c.buildings
                .iter()
                .filter(|b| state.is_revealed(&ObjectRef::Building((*b).clone())))
                .filter_map(|b| def.building(b))
                .map(|b| MapBuilding {
                    id: b.id.clone(),
                    name: b.display_name.clone(),
                    locked: b.locked_by.is_some() && !state.unlocked.contains(&b.id),
                    entered: state.entered.contains(&b.id),
                    current: state.current_building.as_ref() == Some(&b.id),
                })
                .collect()
        })
        .unwrap_or_default();
    let (npcs, items) = match building {
        Some(b) => (
            b.occupants
                .iter()
                .filter(|n| state.is_revealed(&ObjectRef::Npc((*n).clone())))
                .filter_map(|n| def.npc(n))
                .map(|n| Figure {
                    id: n.id.clone(),
                    name: n.display_name.clone(),
                    portrait_ref: n.portrait_ref.clone(),
                    suspect: n.role == NpcRole::Suspect,
                })
                .collect(),
            b.items
                .iter()
                .filter(|i| state.is_revealed(&ObjectRef::Item((*i).clone())))
                .filter(|i| !state.inventory.contains(*i) && !state.consumed.contains(*i))
                .filter_map(|i| item_view(def, i))
                .collect(),
        ),
        None => (Vec::new(), Vec::new()),
    };
    let dialog = state.dialog.as_ref().and_then(|pos| {
        let tree = def.tree_of(&pos.npc)?;
        let node = tree.node(&pos.node)?;
        Some(DialogView {
            npc: pos.npc.clone(),
            npc_name: name_of(def, &ObjectRef::Npc(pos.npc.clone())),
            speaker: node.speaker,
            text: node.text.clone(),
            options: node
                .children
                .iter()
                .filter_map(|c| tree.node(c))
                .map(|c| DialogOption {
                    node: c.id.to_string(),
                    speaker: c.speaker,
                    text: c.text.clone(),
                })
                .collect(),
        })
    });

    let focus = if let Some(i) = &state.interrogation {
        ObjectRef::Npc(i.suspect.clone())
    } else if let Some(d) = &state.dialog {
        ObjectRef::Npc(d.npc.clone())
    } else if let Some(b) = &state.current_building {
        ObjectRef::Building(b.clone())
    } else {
        ObjectRef::City(state.current_city.clone())
    };
    let mut selectable: Vec<ObjectRef> = state.revealed.iter().cloned().collect();
    for s in &def.suspects {
        let r = ObjectRef::Npc(s.clone());
        if !selectable.contains(&r) {
            selectable.push(r);
        }
    }
    for i in &state.inventory {
        let r = ObjectRef::Item(i.clone());
        if !selectable.contains(&r) {
            selectable.push(r);
        }
    }
    selectable.sort();

    let interrogation = state.interrogation.as_ref().map(|i| {
        let script = def.script(&i.suspect);
        InterrogationView {
            suspect: i.suspect.clone(),
            suspect_name: name_of(def, &ObjectRef::Npc(i.suspect.clone())),
            statement_index: i.statement,
            statement_count: script.map_or(0, |s| s.statements.len()),
            text: script
                .and_then(|s| s.statements.get(i.statement))
                .map(|s| s.text.clone())
                .unwrap_or_default(),
            awaiting_arrest: i.awaiting_arrest,
        }
    });
    let ending = state.arrested.as_ref().map(|a| {
        let name = name_of(def, &ObjectRef::Npc(a.clone()));
        let message = if state.outcome == Outcome::Won {
            format!(
                "{name} was the doppelganger. The timeline is safe and {} is avenged.",
                def.victim_name
            )
        } else {
            format!("{name} was innocent. The real culprit escapes and the timeline collapses.")
        };
        Ending {
            outcome: state.outcome,
            arrested: a.clone(),
            arrested_name: name,
            message,
        }
    });

    ViewState {
        title: def.title.clone(),
        victim_name: def.victim_name.clone(),
        backstory: def.backstory.clone(),
        step: state.step,
        outcome: state.outcome,
        display: Display {
            scene,
            city: Named {
                id: state.current_city.to_string(),
                name: city.map(|c| c.display_name.clone()).unwrap_or_default(),
            },
            building: building.map(|b| Named {
                id: b.id.to_string(),
                name: b.display_name.clone(),
            }),
            cities,
            buildings,
            npcs,
            items,
            dialog,
        },
        description_panel: describe(def, state, &focus),
        descriptions: selectable.iter().map(|r| describe(def, state, r)).collect(),
        journal: Journal {
            people: journal_entries(def, state.journal_people.iter().map(|(k, v)| (k.as_str(), *v)), |id| {
                ObjectRef::Npc(id.into())
            }),
            places: journal_entries(
                def,
                state.journal_places.iter().map(|(k, v)| (k.as_str(), *v)),
                place_ref,
            ),
            objects: journal_entries(def, state.journal_objects.iter().map(|(k, v)| (k.as_str(), *v)), |id| {
                ObjectRef::Item(id.into())
            }),
        },
        activity: state.activity_log.iter().map(|r| activity_entry(def, r)).collect(),
        overview: Overview {
            suspects: def
                .suspects
                .iter()
                .map(|s| SuspectView {
                    id: s.clone(),
                    name: name_of(def, &ObjectRef::Npc(s.clone())),
                    known_facts: known_facts(def, state, s),
                    whereabouts: whereabouts(def, state, s),
                    statements_heard: state.heard.get(s).map_or(0, |i| i + 1),
                })
                .collect(),
            inventory: state.inventory.iter().filter_map(|i| item_view(def, i)).collect(),
        },
        interrogation,
        ending,
        legal_actions: legal_actions(state, def),
    }
}

pub fn activity_entry(def: &GameDefinition, r: &EventRecord) -> ActivityEntry {
    ActivityEntry {
        step: r.step,
        text: activity_text(def, &r.event),
        event: r.event.clone(),
    }
}
