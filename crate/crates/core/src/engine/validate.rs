use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::oracle::{solve, OracleResult};
use crate::game::{Effect, FactHolder, GameDefinition, ItemKind, NpcRole, ObjectRef, Tier, SCHEMA_VERSION};

/// A broken invariant. `code` is a stable kebab-case identifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub message: String,
}

struct Report(Vec<Violation>);

impl Report {
    fn add(&mut self, code: &str, message: impl Into<String>) {
        self.0.push(Violation {
            code: code.to_string(),
            message: message.into(),
        });
    }
}

/// Structural checks that do not require playing the game.
pub fn validate(def: &GameDefinition) -> Vec<Violation> {
    let mut r = Report(Vec::new());
    if def.schema_version != SCHEMA_VERSION {
        r.add(
            "schema-version",
            format!("schema version {} is not {SCHEMA_VERSION}", def.schema_version),
        );
    }
    unique_ids(def, &mut r);
    if !r.0.is_empty() {
        return r.0;
    }
    references(def, &mut r);
    if !r.0.is_empty() {
        return r.0;
    }
    suspects(def, &mut r);
    placement(def, &mut r);
    locks(def, &mut r);
    dialogs(def, &mut r);
    facts(def, &mut r);
    scripts(def, &mut r);
    r.0
}

/// [`validate`] plus a full solvability check.
pub fn validate_with_oracle(def: &GameDefinition) -> Vec<Violation> {
    let mut out = validate(def);
    if !out.is_empty() {
        return out;
    }
    match solve(def) {
        OracleResult::Solvable(p) => {
            for o in p.unreached {
                out.push(Violation {
                    code: "unreachable-object".into(),
                    message: format!("{} {} cannot be reached from the start", kind(&o), o.id_str()),
                });
            }
        }
        OracleResult::Unsolvable(u) => out.push(Violation {
            code: "unsolvable".into(),
            message: u.reason,
        }),
    }
    out
}

fn kind(o: &ObjectRef) -> &'static str {
    match o {
        ObjectRef::City(_) => "city",
        ObjectRef::Building(_) => "building",
        ObjectRef::Npc(_) => "npc",
        ObjectRef::Item(_) => "item",
    }
}

fn unique_ids(def: &GameDefinition, r: &mut Report) {
    let mut seen = BTreeSet::new();
    let ids = def
        .cities
        .iter()
        .map(|x| x.id.as_str())
        .chain(def.buildings.iter().map(|x| x.id.as_str()))
        .chain(def.npcs.iter().map(|x| x.id.as_str()))
        .chain(def.items.iter().map(|x| x.id.as_str()))
        .chain(def.clues.iter().map(|x| x.id.as_str()))
        .chain(def.facts.iter().map(|x| x.id.as_str()))
        .chain(def.dialog_trees.iter().map(|x| x.id.as_str()))
        .chain(
            def.dialog_trees
                .iter()
                .flat_map(|t| t.nodes.iter().map(|n| n.id.as_str())),
        );
    for id in ids {
        if !seen.insert(id) {
            r.add("duplicate-id", format!("id {id} is used more than once"));
        }
    }
}

fn references(def: &GameDefinition, r: &mut Report) {
    let mut missing = |what: String| r.add("unknown-reference", what);
    let obj = |o: &ObjectRef| match o {
        ObjectRef::City(c) => def.city(c).is_some(),
        ObjectRef::Building(b) => def.building(b).is_some(),
        ObjectRef::Npc(n) => def.npc(n).is_some(),
        ObjectRef::Item(i) => def.item(i).is_some(),
    };
    for c in &def.cities {
        for b in &c.buildings {
            if def.building(b).is_none() {
                missing(format!("city {} lists unknown building {b}", c.id));
            }
        }
    }
    for b in &def.buildings {
        if def.city(&b.city).is_none() {
            missing(format!("building {} is in unknown city {}", b.id, b.city));
        }
        for n in &b.occupants {
            if def.npc(n).is_none() {
                missing(format!("building {} lists unknown npc {n}", b.id));
            }
        }
        for i in &b.items {
            if def.item(i).is_none() {
                missing(format!("building {} lists unknown item {i}", b.id));
            }
        }
        if let Some(k) = &b.locked_by {
            if def.item(k).is_none() {
                missing(format!("building {} is locked by unknown item {k}", b.id));
            }
        }
    }
    for n in &def.npcs {
        if def.building(&n.building).is_none() {
            missing(format!("npc {} is in unknown building {}", n.id, n.building));
        }
        if let Some(t) = &n.dialog_tree {
            if def.dialog_tree(t).is_none() {
                missing(format!("npc {} has unknown dialog tree {t}", n.id));
            }
        }
        for f in &n.facts_held {
            if def.fact(f).is_none() {
                missing(format!("npc {} holds unknown fact {f}", n.id));
            }
        }
        for c in &n.clues_held {
            if def.clue(c).is_none() {
                missing(format!("npc {} holds unknown clue {c}", n.id));
            }
        }
    }
    for i in &def.items {
        if def.building(&i.building).is_none() {
            missing(format!("item {} is in unknown building {}", i.id, i.building));
        }
        for c in &i.reveals {
            if def.clue(c).is_none() {
                missing(format!("item {} reveals unknown clue {c}", i.id));
            }
        }
        if let Some(b) = &i.unlocks {
            if def.building(b).is_none() {
                missing(format!("item {} unlocks unknown building {b}", i.id));
            }
        }
    }
    for c in &def.clues {
        if !obj(&c.target) {
            missing(format!("clue {} targets unknown {}", c.id, c.target.id_str()));
        }
    }
    for f in &def.facts {
        if def.npc(&f.subject).is_none() {
            missing(format!("fact {} is about unknown npc {}", f.id, f.subject));
        }
        let ok = match &f.holder {
            FactHolder::Npc(n) => def.npc(n).is_some(),
            FactHolder::Item(i) => def.item(i).is_some(),
        };
        if !ok {
            missing(format!("fact {} has an unknown holder", f.id));
        }
    }
    for t in &def.dialog_trees {
        if def.npc(&t.npc).is_none() {
            missing(format!("dialog tree {} belongs to unknown npc {}", t.id, t.npc));
        }
        if t.node(&t.root).is_none() || t.node(&t.hub).is_none() {
            missing(format!("dialog tree {} has an unknown root or hub", t.id));
        }
        for n in &t.nodes {
            for c in &n.children {
                if t.node(c).is_none() {
                    missing(format!("dialog node {} links to unknown node {c}", n.id));
                }
            }
            for e in &n.effects {
                let ok = match e {
                    Effect::RevealClue(c) => def.clue(c).is_some(),
                    Effect::GrantFact(f) => def.fact(f).is_some(),
                };
                if !ok {
                    missing(format!("dialog node {} has an effect on an unknown id", n.id));
                }
            }
        }
    }
    for s in &def.suspects {
        if def.npc(s).is_none() {
            missing(format!("unknown suspect {s}"));
        }
    }
    for s in &def.interrogation_scripts {
        if def.npc(&s.suspect).is_none() {
            missing(format!("script for unknown npc {}", s.suspect));
        }
        for st in &s.statements {
            if let Some(f) = &st.source_fact {
                if def.fact(f).is_none() {
                    missing(format!("statement of {} cites unknown fact {f}", s.suspect));
                }
            }
        }
    }
    if def.city(&def.start_city).is_none() {
        missing(format!("unknown start city {}", def.start_city));
    }
    if def.building(&def.start_building).is_none() {
        missing(format!("unknown start building {}", def.start_building));
    }
}

fn suspects(def: &GameDefinition, r: &mut Report) {
    if def.suspects.len() < 2 {
        r.add(
            "too-few-suspects",
            format!("{} suspect(s); at least 2 required", def.suspects.len()),
        );
    }
    let listed: BTreeSet<_> = def.suspects.iter().collect();
    if listed.len() != def.suspects.len() {
        r.add("duplicate-suspect", "a suspect is listed twice");
    }
    if !listed.contains(&def.culprit) {
        r.add(
            "culprit-not-in-suspects",
            format!("culprit {} is not a suspect", def.culprit),
        );
    }
    for n in &def.npcs {
        let is_suspect = n.role == NpcRole::Suspect;
        if is_suspect != listed.contains(&n.id) {
            r.add(
                "suspect-role-mismatch",
                format!("npc {} role disagrees with the suspect list", n.id),
            );
        }
        if is_suspect && n.dialog_tree.is_some() {
            r.add("suspect-has-dialog", format!("suspect {} has a dialog tree", n.id));
        }
        if !is_suspect && n.dialog_tree.is_none() {
            r.add("npc-missing-dialog", format!("npc {} has no dialog tree", n.id));
        }
    }
}

fn placement(def: &GameDefinition, r: &mut Report) {
    let mut names = BTreeSet::new();
    for c in &def.cities {
        if c.buildings.is_empty() {
            r.add("city-without-buildings", format!("city {} has no landmark", c.id));
        }
        if !names.insert(c.display_name.as_str()) {
            r.add(
                "duplicate-city-name",
                format!("city name {} is used twice", c.display_name),
            );
        }
        for b in &c.buildings {
            if def.building(b).is_some_and(|b| b.city != c.id) {
                r.add(
                    "building-city-mismatch",
                    format!("building {b} is listed by city {}", c.id),
                );
            }
        }
    }
    for b in &def.buildings {
        if !def.city(&b.city).is_some_and(|c| c.buildings.contains(&b.id)) {
            r.add(
                "building-city-mismatch",
                format!("city {} does not list building {}", b.city, b.id),
            );
        }
        for n in &b.occupants {
            if def.npc(n).is_some_and(|n| n.building != b.id) {
                r.add(
                    "occupant-mismatch",
                    format!("building {} lists npc {n} placed elsewhere", b.id),
                );
            }
        }
        for i in &b.items {
            if def.item(i).is_some_and(|i| i.building != b.id) {
                r.add(
                    "item-location-mismatch",
                    format!("building {} lists item {i} placed elsewhere", b.id),
                );
            }
        }
    }
    for n in &def.npcs {
        if !def.building(&n.building).is_some_and(|b| b.occupants.contains(&n.id)) {
            r.add(
                "occupant-mismatch",
                format!("npc {} is not listed by its building", n.id),
            );
        }
    }
    for i in &def.items {
        if !def.building(&i.building).is_some_and(|b| b.items.contains(&i.id)) {
            r.add(
                "item-location-mismatch",
                format!("item {} is not listed by its building", i.id),
            );
        }
    }
    if def
        .building(&def.start_building)
        .is_some_and(|b| b.city != def.start_city)
    {
        r.add(
            "start-building-outside-start-city",
            "the start building is not in the start city",
        );
    }
}

fn locks(def: &GameDefinition, r: &mut Report) {
    for b in &def.buildings {
        if let Some(k) = &b.locked_by {
            let ok = def
                .item(k)
                .is_some_and(|i| i.kind == ItemKind::Key && i.unlocks.as_ref() == Some(&b.id));
            if !ok {
                r.add(
                    "lock-without-key",
                    format!("building {} is locked by {k}, which does not open it", b.id),
                );
            }
            if b.id == def.start_building {
                r.add("start-building-locked", "the start building is locked");
            }
        }
    }
    for i in &def.items {
        match (i.kind == ItemKind::Key, &i.unlocks) {
            (true, Some(b)) => {
                if def.building(b).and_then(|b| b.locked_by.as_ref()) != Some(&i.id) {
                    r.add(
                        "key-without-lock",
                        format!("key {} opens {b}, which it does not lock", i.id),
                    );
                }
            }
            (true, None) => r.add("key-without-lock", format!("key {} opens nothing", i.id)),
            (false, Some(_)) => r.add("key-without-lock", format!("item {} unlocks but is not a key", i.id)),
            (false, None) => {}
        }
    }
}

fn dialogs(def: &GameDefinition, r: &mut Report) {
    for t in &def.dialog_trees {
        if def.npc(&t.npc).and_then(|n| n.dialog_tree.as_ref()) != Some(&t.id) {
            r.add(
                "dialog-owner-mismatch",
                format!("dialog tree {} is not used by {}", t.id, t.npc),
            );
        }
        let mut reach = BTreeSet::from([&t.root]);
        let mut stack = vec![&t.root];
        while let Some(id) = stack.pop() {
            for c in t.node(id).map(|n| n.children.as_slice()).unwrap_or_default() {
                if reach.insert(c) {
                    stack.push(c);
                }
            }
        }
        for n in &t.nodes {
            if !reach.contains(&n.id) {
                r.add("dialog-dangling-node", format!("dialog node {} is unreachable", n.id));
            }
            let tier_ok = n.effects.iter().all(|e| match e {
                Effect::RevealClue(_) => n.tier == Tier::Essential,
                Effect::GrantFact(_) => n.tier == Tier::FactGiving,
            });
            if !tier_ok {
                r.add(
                    "dialog-effect-tier",
                    format!("dialog node {} has effects its tier does not allow", n.id),
                );
            }
            for e in &n.effects {
                let held = def.npc(&t.npc).is_some_and(|npc| match e {
                    Effect::RevealClue(c) => npc.clues_held.contains(c),
                    Effect::GrantFact(f) => npc.facts_held.contains(f),
                });
                if !held {
                    r.add(
                        "dialog-effect-not-held",
                        format!("dialog node {} gives away something {} does not hold", n.id, t.npc),
                    );
                }
            }
        }
    }
}

fn facts(def: &GameDefinition, r: &mut Report) {
    let mut per_suspect: BTreeMap<_, usize> = BTreeMap::new();
    for f in &def.facts {
        if !f.truthful {
            r.add("held-fact-untruthful", format!("fact {} is marked untruthful", f.id));
        }
        if !def.is_suspect(&f.subject) {
            r.add(
                "fact-subject-not-suspect",
                format!("fact {} is about non-suspect {}", f.id, f.subject),
            );
        }
        *per_suspect.entry(&f.subject).or_default() += 1;
        let listed = match &f.holder {
            FactHolder::Npc(n) => def.npc(n).is_some_and(|n| n.facts_held.contains(&f.id)),
            FactHolder::Item(_) => !def.npcs.iter().any(|n| n.facts_held.contains(&f.id)),
        };
        if !listed {
            r.add(
                "fact-holder-mismatch",
                format!("fact {} is not held where it claims", f.id),
            );
        }
    }
    for n in &def.npcs {
        for f in &n.facts_held {
            if def.fact(f).is_some_and(|f| f.holder != FactHolder::Npc(n.id.clone())) {
                r.add(
                    "fact-holder-mismatch",
                    format!("npc {} holds fact {f} owned by someone else", n.id),
                );
            }
        }
    }
    for s in &def.suspects {
        if !per_suspect.contains_key(s) {
            r.add("suspect-without-facts", format!("no facts about suspect {s}"));
        }
    }
}

fn scripts(def: &GameDefinition, r: &mut Report) {
    for s in &def.suspects {
        let Some(script) = def.script(s) else {
            r.add("missing-interrogation-script", format!("suspect {s} has no script"));
            continue;
        };
        if script.statements.is_empty() {
            r.add("empty-interrogation-script", format!("suspect {s} has nothing to say"));
        }
        let false_count = script.statements.iter().filter(|x| !x.truthful).count();
        if s == &def.culprit {
            if false_count != 1 {
                r.add(
                    "false-statement-count",
                    format!("the culprit makes {false_count} false statements; exactly 1 required"),
                );
            }
            for st in script.statements.iter().filter(|x| !x.truthful) {
                let contradicted = def.facts_about(s).any(|f| {
                    f.truthful
                        && f.predicate_label == st.claim.predicate_label
                        && st.claim.value_label.as_ref() != Some(&f.value_label)
                });
                if !contradicted {
                    r.add(
                        "false-statement-uncontradicted",
                        format!("no fact about the culprit contradicts \"{}\"", st.text),
                    );
                }
            }
        } else if false_count > 0 {
            r.add("false-statement-not-culprit", format!("innocent suspect {s} lies"));
        }
    }
    let scripted: BTreeSet<_> = def.interrogation_scripts.iter().map(|s| &s.suspect).collect();
    if scripted.len() != def.interrogation_scripts.len() {
        r.add("duplicate-interrogation-script", "a suspect has more than one script");
    }
    for s in scripted {
        if !def.is_suspect(s) {
            r.add(
                "script-for-non-suspect",
                format!("npc {s} has a script but is not a suspect"),
            );
        }
    }
}
