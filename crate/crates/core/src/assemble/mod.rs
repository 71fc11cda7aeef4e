//! Turns the selected suspects and their paths into a playable game.
//!
//! Stages, each a function over a [`Draft`]: [`instantiate_objects`],
//! [`fill_gaps`], [`assign_facts`], [`build_interrogation_scripts`],
//! [`place_locks_and_keys`] and [`render`].

mod facts;
mod locks;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialog::{
    bindings, build_dialog_tree, ArticleStyle, ClueKind, ClueLine, DialogError, ExpandError, FactLine, Grammar,
    NpcDialogInput, SlotBindings,
};
use crate::game::{
    Building, BuildingId, City, CityId, Clue, ClueId, DialogTreeId, FactId, GameDefinition, Item, ItemId, ItemKind,
    Npc, NpcId, NpcRole, ObjectRef, SCHEMA_VERSION,
};
use crate::kg::{EntityId, EntityKind, KnowledgeGraph};
use crate::paths::ArticlePath;
use crate::rng::{stage_rng, GameRng};

pub use facts::{
    admissible_facts, assign_facts, build_interrogation_scripts, AllowedPredicate, AllowlistError, FactAllowlist,
};
pub use locks::{building_order, place_locks_and_keys};

pub const LANDMARKS: &[&str] = &[
    "Library",
    "Town Hall",
    "Museum",
    "Archive",
    "Train Station",
    "Post Office",
    "Market Hall",
    "Observatory",
];
pub const STAFF: &[&str] = &["Housekeeper", "Butler", "Gardener", "Chauffeur", "Cook", "Secretary"];
pub const DEFAULT_CITY: &str = "Downtown";
const CLUE_ITEM_KINDS: [ItemKind; 3] = [ItemKind::Book, ItemKind::Letter, ItemKind::Photograph];
const DEFAULT_NAMES: &str = include_str!("../../data/names.txt");
const COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";

#[derive(Debug, Error)]
pub enum AssembleError {
    #[error("need at least two suspects, got {0}")]
    TooFewSuspects(usize),
    #[error("path {index} does not run from the victim to suspect {suspect}")]
    BadPath { index: usize, suspect: EntityId },
    #[error("culprit {0} is not one of the suspects")]
    CulpritNotSuspect(EntityId),
    #[error("suspect {suspect} has no admissible facts")]
    NoAdmissibleFacts { suspect: EntityId },
    #[error(transparent)]
    Dialog(#[from] DialogError),
    #[error(transparent)]
    Expand(#[from] ExpandError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssembleConfig {
    /// `None` means `min(2, buildings - 1)`.
    pub lock_count: Option<usize>,
    pub facts_per_suspect: usize,
    pub articles: ArticleStyle,
}

impl Default for AssembleConfig {
    fn default() -> Self {
        AssembleConfig {
            lock_count: None,
            facts_per_suspect: 3,
            articles: ArticleStyle::Smoothed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NameList(Vec<String>);

impl NameList {
    pub fn from_text(text: &str) -> Self {
        NameList(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect(),
        )
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }
}

impl Default for NameList {
    fn default() -> Self {
        Self::from_text(DEFAULT_NAMES)
    }
}

/// Replaceable text resources.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub grammar: Grammar,
    pub allowlist: FactAllowlist,
    pub names: NameList,
}

/// What assembly is asked to build: suspects in genome order, with one path
/// per suspect at the same index.
#[derive(Debug, Clone, Copy)]
pub struct Plot<'a> {
    pub graph: &'a KnowledgeGraph,
    pub victim: &'a EntityId,
    pub suspects: &'a [EntityId],
    pub culprit: &'a EntityId,
    pub paths: &'a [ArticlePath],
    pub seed: u64,
}

/// A clue whose holder is a place and still needs a filler NPC to speak it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Handoff {
    pub entity: EntityId,
    pub building: BuildingId,
    pub clue: ClueId,
    pub path: usize,
    pub position: usize,
}

#[derive(Debug, Clone)]
pub struct Draft {
    pub game: GameDefinition,
    /// One game object per distinct path entity. The victim maps to the
    /// start building.
    pub objects: BTreeMap<EntityId, ObjectRef>,
    /// Distinct non-victim entities on any path.
    pub path_entities: BTreeSet<EntityId>,
    pub suspects: Vec<EntityId>,
    pub suspect_npcs: Vec<NpcId>,
    /// Regular NPCs at the start building, one per path.
    pub staff: Vec<NpcId>,
    /// Per path and node, the regular NPC speaking that node's clue.
    pub holders: Vec<Vec<Option<NpcId>>>,
    pub handoffs: Vec<Handoff>,
    /// Dialog phrase for each fact, e.g. "mentor of Max Delbrück".
    pub attributes: BTreeMap<FactId, String>,
    pub warnings: Vec<String>,
}

impl Draft {
    pub fn city_mut(&mut self, id: &CityId) -> &mut City {
        self.game.cities.iter_mut().find(|c| &c.id == id).expect("city exists")
    }

    pub fn building_mut(&mut self, id: &BuildingId) -> &mut Building {
        self.game
            .buildings
            .iter_mut()
            .find(|b| &b.id == id)
            .expect("building exists")
    }

    pub fn npc_mut(&mut self, id: &NpcId) -> &mut Npc {
        self.game.npcs.iter_mut().find(|n| &n.id == id).expect("npc exists")
    }

    pub fn item_mut(&mut self, id: &ItemId) -> &mut Item {
        self.game.items.iter_mut().find(|i| &i.id == id).expect("item exists")
    }

    fn add_city(&mut self, name: &str, source: Option<EntityId>, rng: &mut GameRng) -> CityId {
        let id = CityId::numbered(self.game.cities.len());
        let mut display = name.to_string();
        let mut n = 2;
        while self.game.cities.iter().any(|c| c.display_name == display) {
            display = format!("{name} ({n})");
            n += 1;
        }
        self.game.cities.push(City {
            id: id.clone(),
            display_name: display,
            source_entity: source,
            description: String::new(),
            buildings: Vec::new(),
        });
        let landmark = LANDMARKS.choose(rng).expect("non-empty");
        self.add_building(landmark, &id, None);
        id
    }

    fn add_building(&mut self, name: &str, city: &CityId, source: Option<EntityId>) -> BuildingId {
        let id = BuildingId::numbered(self.game.buildings.len());
        self.game.buildings.push(Building {
            id: id.clone(),
            display_name: name.to_string(),
            city: city.clone(),
            source_entity: source,
            description: String::new(),
            locked_by: None,
            occupants: Vec::new(),
            items: Vec::new(),
        });
        self.city_mut(city).buildings.push(id.clone());
        id
    }

    fn add_npc(
        &mut self,
        name: &str,
        source: Option<EntityId>,
        portrait: Option<String>,
        role: NpcRole,
        building: &BuildingId,
    ) -> NpcId {
        let id = NpcId::numbered(self.game.npcs.len());
        self.game.npcs.push(Npc {
            id: id.clone(),
            display_name: name.to_string(),
            source_entity: source,
            portrait_ref: portrait,
            role,
            building: building.clone(),
            description: String::new(),
            dialog_tree: None,
            facts_held: Vec::new(),
            clues_held: Vec::new(),
        });
        self.building_mut(building).occupants.push(id.clone());
        id
    }

    pub(crate) fn add_item(
        &mut self,
        name: &str,
        kind: ItemKind,
        source: Option<EntityId>,
        image: Option<String>,
        building: &BuildingId,
    ) -> ItemId {
        let id = ItemId::numbered(self.game.items.len());
        self.game.items.push(Item {
            id: id.clone(),
            display_name: name.to_string(),
            kind,
            source_entity: source,
            image_ref: image,
            description: String::new(),
            building: building.clone(),
            reveals: Vec::new(),
            unlocks: None,
        });
        self.building_mut(building).items.push(id.clone());
        id
    }

    fn add_clue(&mut self, target: ObjectRef) -> ClueId {
        let id = ClueId::numbered(self.game.clues.len());
        self.game.clues.push(Clue {
            id: id.clone(),
            target,
            source_text: String::new(),
        });
        id
    }

    fn landmark(&self, city: &CityId) -> BuildingId {
        self.game.city(city).expect("city exists").buildings[0].clone()
    }

    /// Game objects derived from path entities.
    pub fn path_object_count(&self) -> usize {
        self.path_entities.len()
    }
}

fn check_plot(plot: &Plot<'_>) -> Result<(), AssembleError> {
    if plot.suspects.len() < 2 {
        return Err(AssembleError::TooFewSuspects(plot.suspects.len()));
    }
    if !plot.suspects.contains(plot.culprit) {
        return Err(AssembleError::CulpritNotSuspect(plot.culprit.clone()));
    }
    for (index, suspect) in plot.suspects.iter().enumerate() {
        let ok = plot.paths.get(index).is_some_and(|p| {
            p.nodes.len() >= 2
                && p.source() == plot.victim
                && p.target() == suspect
                && !p
                    .interior()
                    .iter()
                    .any(|n| plot.suspects.contains(n) || n == plot.victim)
        });
        if !ok {
            return Err(AssembleError::BadPath {
                index,
                suspect: suspect.clone(),
            });
        }
    }
    Ok(())
}

/// Maps every distinct path entity to one game object and chains clues
/// along each path.
///
/// The victim becomes the start building, staffed with one clue-giving NPC
/// per path. People become NPCs in their own house, settlements become
/// cities with a public landmark, other places become buildings in the
/// current city and everything else becomes an item in the current city's
/// landmark. Suspects live in houses that only their path's last clue
/// reveals.
pub fn instantiate_objects(plot: &Plot<'_>, rng: &mut GameRng) -> Result<Draft, AssembleError> {
    check_plot(plot)?;
    let g = plot.graph;
    let victim_name = g.label(plot.victim);
    let start_entity = g
        .neighbors(plot.victim)
        .into_iter()
        .find(|e| g.is_settlement(e) && !plot.suspects.contains(e));

    let culprit_index = plot.suspects.iter().position(|s| s == plot.culprit).expect("checked");
    let mut d = Draft {
        game: GameDefinition {
            schema_version: SCHEMA_VERSION.to_string(),
            title: format!("The Death of {victim_name}"),
            victim_name: victim_name.clone(),
            victim_entity: Some(plot.victim.clone()),
            backstory: Vec::new(),
            suspects: Vec::new(),
            culprit: NpcId::numbered(0),
            cities: Vec::new(),
            buildings: Vec::new(),
            npcs: Vec::new(),
            items: Vec::new(),
            clues: Vec::new(),
            facts: Vec::new(),
            dialog_trees: Vec::new(),
            interrogation_scripts: Vec::new(),
            start_city: CityId::numbered(0),
            start_building: BuildingId::numbered(0),
            rng_seed: plot.seed,
        },
        objects: BTreeMap::new(),
        path_entities: BTreeSet::new(),
        suspects: plot.suspects.to_vec(),
        suspect_npcs: Vec::new(),
        staff: Vec::new(),
        holders: Vec::new(),
        handoffs: Vec::new(),
        attributes: BTreeMap::new(),
        warnings: Vec::new(),
    };

    let start_city_name = start_entity.as_ref().map_or(DEFAULT_CITY.to_string(), |e| g.label(e));
    let start_city = d.add_city(&start_city_name, start_entity.clone(), rng);
    if let Some(e) = start_entity {
        d.objects.insert(e, ObjectRef::City(start_city.clone()));
    }
    let start_building = d.add_building(&format!("House of {victim_name}"), &start_city, None);
    d.objects
        .insert(plot.victim.clone(), ObjectRef::Building(start_building.clone()));
    d.game.start_city = start_city.clone();
    d.game.start_building = start_building.clone();

    for i in 0..plot.paths.len() {
        let name = match STAFF.get(i) {
            Some(n) => n.to_string(),
            None => format!("{} {}", STAFF[i % STAFF.len()], i / STAFF.len() + 1),
        };
        let npc = d.add_npc(&name, None, None, NpcRole::Regular, &start_building);
        d.staff.push(npc);
    }

    let mut suspect_npcs = BTreeMap::new();
    for (i, path) in plot.paths.iter().enumerate() {
        let mut city = start_city.clone();
        let mut holders = vec![Some(d.staff[i].clone())];
        let last = path.nodes.len() - 1;
        for (j, e) in path.nodes.iter().enumerate().skip(1) {
            d.path_entities.insert(e.clone());
            let obj = match d.objects.get(e) {
                Some(o) => o.clone(),
                None => {
                    let o = create_object(&mut d, g, e, &city, j == last, rng);
                    d.objects.insert(e.clone(), o.clone());
                    o
                }
            };
            if let ObjectRef::City(c) = &obj {
                city = c.clone();
            }
            holders.push(match &obj {
                ObjectRef::Npc(n) if j != last => Some(n.clone()),
                _ => None,
            });
            if j == last {
                if let ObjectRef::Npc(n) = obj {
                    suspect_npcs.insert(i, n);
                }
            }
        }
        d.holders.push(holders);
    }
    d.suspect_npcs = (0..plot.suspects.len()).map(|i| suspect_npcs[&i].clone()).collect();
    d.game.suspects = d.suspect_npcs.clone();
    d.game.culprit = d.suspect_npcs[culprit_index].clone();

    let mut seen = BTreeSet::new();
    for (i, path) in plot.paths.iter().enumerate() {
        for j in 0..path.nodes.len() - 1 {
            let target = d.objects[&path.nodes[j + 1]].clone();
            let from = if j == 0 {
                format!("staff:{i}")
            } else {
                path.nodes[j].as_str().to_string()
            };
            if !seen.insert((from, target.clone())) {
                continue;
            }
            let clue = d.add_clue(target);
            if j == 0 {
                let staff = d.staff[i].clone();
                d.npc_mut(&staff).clues_held.push(clue);
                continue;
            }
            match d.objects[&path.nodes[j]].clone() {
                ObjectRef::Npc(n) => d.npc_mut(&n).clues_held.push(clue),
                ObjectRef::Item(it) => d.item_mut(&it).reveals.push(clue),
                ObjectRef::City(c) => {
                    let building = d.landmark(&c);
                    d.handoffs.push(Handoff {
                        entity: path.nodes[j].clone(),
                        building,
                        clue,
                        path: i,
                        position: j,
                    });
                }
                ObjectRef::Building(b) => d.handoffs.push(Handoff {
                    entity: path.nodes[j].clone(),
                    building: b,
                    clue,
                    path: i,
                    position: j,
                }),
            }
        }
    }
    Ok(d)
}

fn create_object(
    d: &mut Draft,
    g: &KnowledgeGraph,
    e: &EntityId,
    city: &CityId,
    is_suspect: bool,
    rng: &mut GameRng,
) -> ObjectRef {
    let label = g.label(e);
    if is_suspect || g.kind_of(e) == EntityKind::Person {
        let house = d.add_building(&format!("House of {label}"), city, None);
        let role = if is_suspect { NpcRole::Suspect } else { NpcRole::Regular };
        return ObjectRef::Npc(d.add_npc(&label, Some(e.clone()), g.image_ref(e), role, &house));
    }
    if g.is_settlement(e) {
        return ObjectRef::City(d.add_city(&label, Some(e.clone()), rng));
    }
    match g.kind_of(e) {
        EntityKind::Place => ObjectRef::Building(d.add_building(&label, city, Some(e.clone()))),
        _ => {
            let kind = *CLUE_ITEM_KINDS.choose(rng).expect("non-empty");
            let landmark = d.landmark(city);
            ObjectRef::Item(d.add_item(&label, kind, Some(e.clone()), g.image_ref(e), &landmark))
        }
    }
}

/// Gives every place that must pass on a clue a filler NPC with a random
/// name, standing in that place's building. One filler per place entity.
pub fn fill_gaps(d: &mut Draft, names: &NameList, rng: &mut GameRng) {
    let handoffs = std::mem::take(&mut d.handoffs);
    let mut order: Vec<EntityId> = Vec::new();
    for h in &handoffs {
        if !order.contains(&h.entity) {
            order.push(h.entity.clone());
        }
    }
    let taken: BTreeSet<String> = d.game.npcs.iter().map(|n| n.display_name.clone()).collect();
    let mut available: Vec<&String> = names.names().iter().filter(|n| !taken.contains(*n)).collect();
    for (k, entity) in order.iter().enumerate() {
        let name = if available.is_empty() {
            format!("Stranger {}", k + 1)
        } else {
            available.remove(rng.gen_range(0..available.len())).clone()
        };
        let mine: Vec<&Handoff> = handoffs.iter().filter(|h| &h.entity == entity).collect();
        let npc = d.add_npc(&name, None, None, NpcRole::Regular, &mine[0].building);
        for h in mine {
            d.npc_mut(&npc).clues_held.push(h.clue.clone());
            d.holders[h.path][h.position] = Some(npc.clone());
        }
    }
}

fn render_line(
    grammar: &Grammar,
    symbol: &str,
    b: &SlotBindings,
    style: ArticleStyle,
    rng: &mut GameRng,
) -> Result<String, ExpandError> {
    Ok(style.apply(grammar.expand(symbol, b, rng)?))
}

fn join_names(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

fn blurb(g: &KnowledgeGraph, e: &EntityId) -> Option<String> {
    let comment = g.objects(e, COMMENT).find_map(|o| match o {
        crate::kg::TripleObject::Literal(l) => Some(l.value.clone()),
        _ => None,
    })?;
    Some(comment.chars().take(300).collect())
}

/// Dialog trees, descriptions, clue texts and the backstory.
pub fn render(d: &mut Draft, plot: &Plot<'_>, res: &Resources, style: ArticleStyle) -> Result<(), AssembleError> {
    let g = plot.graph;
    let grammar = &res.grammar;
    let mut rng = stage_rng(plot.seed, "describe");

    let npc_ids: Vec<NpcId> = d.game.npcs.iter().map(|n| n.id.clone()).collect();
    for id in &npc_ids {
        let npc = d.game.npc(id).expect("listed").clone();
        let desc_symbol = match npc.role {
            NpcRole::Suspect => "suspect-description",
            NpcRole::Regular => "npc-description",
        };
        let mut description = render_line(
            grammar,
            desc_symbol,
            &bindings([("name", npc.display_name.as_str())]),
            style,
            &mut rng,
        )?;
        if let Some(extra) = npc.source_entity.as_ref().and_then(|e| blurb(g, e)) {
            description = format!("{description} {extra}");
        }
        d.npc_mut(id).description = description;
        if npc.role == NpcRole::Suspect {
            continue;
        }

        let clues = npc
            .clues_held
            .iter()
            .map(|c| {
                let target = &d.game.clue(c).expect("clue exists").target;
                ClueLine {
                    clue: c.clone(),
                    kind: ClueKind::of(target),
                    target_name: d.game.display_name(target).unwrap_or_default().to_string(),
                }
            })
            .collect();
        let facts = npc
            .facts_held
            .iter()
            .map(|f| {
                let fact = d.game.fact(f).expect("fact exists");
                FactLine {
                    fact: f.clone(),
                    suspect_name: d.game.npc(&fact.subject).expect("suspect exists").display_name.clone(),
                    attribute: d.attributes[f].clone(),
                }
            })
            .collect();
        let (residence, about) = match &npc.source_entity {
            Some(e) => {
                let residence = res
                    .allowlist
                    .residence_predicates
                    .iter()
                    .find_map(|p| g.objects(e, p).next().map(|o| crate::kg::object_label(g, o)));
                let about = admissible_facts(g, &res.allowlist, e)
                    .into_iter()
                    .next()
                    .map(|(p, values)| p.attribute_for(&values[0]));
                (residence, about)
            }
            None => (None, None),
        };
        let input = NpcDialogInput {
            npc: id.clone(),
            name: npc.display_name.clone(),
            clues,
            facts,
            residence,
            about,
        };
        let tree_id = DialogTreeId::numbered(d.game.dialog_trees.len());
        let mut tree_rng = stage_rng(plot.seed, &format!("dialog:{id}"));
        let (tree, clue_texts) = build_dialog_tree(tree_id.clone(), &input, grammar, style, &mut tree_rng)?;
        for (clue, text) in clue_texts {
            d.game
                .clues
                .iter_mut()
                .find(|c| c.id == clue)
                .expect("clue exists")
                .source_text = text;
        }
        d.game.dialog_trees.push(tree);
        d.npc_mut(id).dialog_tree = Some(tree_id);
    }

    let item_ids: Vec<ItemId> = d.game.items.iter().map(|i| i.id.clone()).collect();
    for id in &item_ids {
        let item = d.game.item(id).expect("listed").clone();
        let description = if let Some(b) = &item.unlocks {
            let name = d.game.building(b).expect("lock exists").display_name.clone();
            render_line(
                grammar,
                "key-description",
                &bindings([("building", name.as_str())]),
                style,
                &mut rng,
            )?
        } else {
            let mut text = render_line(
                grammar,
                "item-description",
                &bindings([("itemKind", item.kind.noun()), ("thing", item.display_name.as_str())]),
                style,
                &mut rng,
            )?;
            for c in &item.reveals {
                let target = d.game.clue(c).expect("clue exists").target.clone();
                let name = d.game.display_name(&target).unwrap_or_default().to_string();
                let line = render_line(
                    grammar,
                    "item-clue",
                    &bindings([("target", name.as_str())]),
                    style,
                    &mut rng,
                )?;
                text = format!("{text} {line}");
                d.game
                    .clues
                    .iter_mut()
                    .find(|x| &x.id == c)
                    .expect("clue exists")
                    .source_text = line;
            }
            text
        };
        d.item_mut(id).description = description;
    }

    let building_ids: Vec<BuildingId> = d.game.buildings.iter().map(|b| b.id.clone()).collect();
    for id in &building_ids {
        let b = d.game.building(id).expect("listed");
        let city = d.game.city(&b.city).expect("city exists").display_name.clone();
        let name = b.display_name.clone();
        let mut text = render_line(
            grammar,
            "building-description",
            &bindings([("name", name.as_str()), ("city", city.as_str())]),
            style,
            &mut rng,
        )?;
        if let Some(extra) = b.source_entity.as_ref().and_then(|e| blurb(g, e)) {
            text = format!("{text} {extra}");
        }
        d.building_mut(id).description = text;
    }

    let city_ids: Vec<CityId> = d.game.cities.iter().map(|c| c.id.clone()).collect();
    for id in &city_ids {
        let c = d.game.city(id).expect("listed");
        let name = c.display_name.clone();
        let mut text = render_line(
            grammar,
            "city-description",
            &bindings([("name", name.as_str())]),
            style,
            &mut rng,
        )?;
        if let Some(extra) = c.source_entity.as_ref().and_then(|e| blurb(g, e)) {
            text = format!("{text} {extra}");
        }
        d.city_mut(id).description = text;
    }

    let suspect_names: Vec<String> = d
        .suspect_npcs
        .iter()
        .map(|s| d.game.npc(s).expect("suspect exists").display_name.clone())
        .collect();
    let victim = d.game.victim_name.clone();
    let suspects = join_names(&suspect_names);
    d.game.backstory = vec![
        render_line(
            grammar,
            "backstory-intro",
            &bindings([("victim", victim.as_str())]),
            style,
            &mut rng,
        )?,
        render_line(grammar, "backstory-agent", &SlotBindings::new(), style, &mut rng)?,
        render_line(
            grammar,
            "backstory-suspects",
            &bindings([("suspects", suspects.as_str())]),
            style,
            &mut rng,
        )?,
    ];
    Ok(())
}

/// A finished game plus what assembly had to compromise on.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub game: GameDefinition,
    pub path_objects: usize,
    pub warnings: Vec<String>,
}

/// Runs every assembly stage with per-stage seeded randomness.
pub fn assemble(plot: &Plot<'_>, res: &Resources, cfg: &AssembleConfig) -> Result<Assembly, AssembleError> {
    let mut d = instantiate_objects(plot, &mut stage_rng(plot.seed, "layout"))?;
    fill_gaps(&mut d, &res.names, &mut stage_rng(plot.seed, "fillers"));
    assign_facts(plot.graph, &mut d, &res.allowlist, cfg.facts_per_suspect)?;
    build_interrogation_scripts(
        plot.graph,
        &mut d,
        res,
        cfg.articles,
        &mut stage_rng(plot.seed, "scripts"),
    )?;
    place_locks_and_keys(&mut d, cfg.lock_count, &mut stage_rng(plot.seed, "locks"));
    render(&mut d, plot, res, cfg.articles)?;
    let path_objects = d.path_object_count();
    Ok(Assembly {
        game: d.game,
        path_objects,
        warnings: d.warnings,
    })
}
