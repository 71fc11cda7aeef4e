use std::collections::BTreeSet;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{render_line, AssembleError, Draft, Resources};
use crate::dialog::{bindings, ArticleStyle};
use crate::game::{Claim, Fact, FactHolder, FactId, InterrogationScript, NpcId, Statement};
use crate::kg::{object_label, EntityId, KnowledgeGraph};
use crate::rng::GameRng;

const DEFAULT_ALLOWLIST: &str = include_str!("../../data/facts.toml");

#[derive(Debug, Error)]
pub enum AllowlistError {
    #[error("cannot read allowlist {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid allowlist: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllowedPredicate {
    pub iri: String,
    pub label: String,
    /// Completes "X is a ..."; `<value>` stands for the object's label.
    pub attribute: String,
    pub noun: String,
}

impl AllowedPredicate {
    pub fn attribute_for(&self, value: &str) -> String {
        self.attribute.replace("<value>", value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactAllowlist {
    #[serde(rename = "predicate")]
    pub predicates: Vec<AllowedPredicate>,
    #[serde(default)]
    pub residence_predicates: Vec<String>,
}

impl FactAllowlist {
    pub fn from_toml(text: &str) -> Result<Self, AllowlistError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, AllowlistError> {
        let text = std::fs::read_to_string(path).map_err(|source| AllowlistError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn get(&self, iri: &str) -> Option<&AllowedPredicate> {
        self.predicates.iter().find(|p| p.iri == iri)
    }
}

impl Default for FactAllowlist {
    fn default() -> Self {
        Self::from_toml(DEFAULT_ALLOWLIST).expect("bundled allowlist is valid")
    }
}

/// Allowlisted predicates asserted for `e`, in allowlist order, each with
/// its distinct value labels sorted.
pub fn admissible_facts<'a>(
    graph: &KnowledgeGraph,
    allowlist: &'a FactAllowlist,
    e: &EntityId,
) -> Vec<(&'a AllowedPredicate, Vec<String>)> {
    allowlist
        .predicates
        .iter()
        .filter_map(|p| {
            let values: BTreeSet<String> = graph
                .objects(e, &p.iri)
                .map(|o| object_label(graph, o))
                .filter(|v| !v.trim().is_empty())
                .collect();
            (!values.is_empty()).then(|| (p, values.into_iter().collect()))
        })
        .collect()
}

struct Candidates<'a> {
    rows: Vec<(&'a AllowedPredicate, Vec<String>)>,
}

impl Candidates<'_> {
    fn values(&self, iri: &str) -> Option<&[String]> {
        self.rows.iter().find(|(p, _)| p.iri == iri).map(|(_, v)| v.as_slice())
    }

    /// The value shown for a predicate: its smallest label.
    fn shown(&self, iri: &str) -> Option<&str> {
        self.values(iri).map(|v| v[0].as_str())
    }
}

/// Chooses up to `facts_per_suspect` truthful facts per suspect, at most one
/// per predicate, and hands them to regular NPCs that the player meets
/// before the suspect: the start building's staff first, then NPCs along
/// that suspect's path.
///
/// Predicates on which the culprit differs from another suspect are chosen
/// first, for the culprit and for the suspects it can be contrasted with, so
/// that the culprit's lie can be caught.
pub fn assign_facts(
    graph: &KnowledgeGraph,
    d: &mut Draft,
    allowlist: &FactAllowlist,
    facts_per_suspect: usize,
) -> Result<(), AssembleError> {
    let want = facts_per_suspect.max(1);
    let cands: Vec<Candidates<'_>> = d
        .suspects
        .iter()
        .map(|s| Candidates {
            rows: admissible_facts(graph, allowlist, s),
        })
        .collect();
    for (s, c) in d.suspects.iter().zip(&cands) {
        if c.rows.is_empty() {
            return Err(AssembleError::NoAdmissibleFacts { suspect: s.clone() });
        }
    }
    let culprit = d
        .suspect_npcs
        .iter()
        .position(|n| n == &d.game.culprit)
        .expect("culprit is a suspect");
    let order = |p: &str| {
        allowlist
            .predicates
            .iter()
            .position(|x| x.iri == p)
            .unwrap_or(usize::MAX)
    };

    let mut chosen: Vec<Vec<(&AllowedPredicate, String)>> = vec![Vec::new(); d.suspects.len()];
    let culprit_contrast = |p: &str, other: usize| -> bool {
        match (cands[culprit].values(p), cands[other].shown(p)) {
            (Some(mine), Some(theirs)) => !mine.iter().any(|v| v == theirs),
            _ => false,
        }
    };

    let mut rows: Vec<&(&AllowedPredicate, Vec<String>)> = cands[culprit].rows.iter().collect();
    rows.sort_by_key(|(p, _)| {
        let contrast = (0..d.suspects.len()).any(|o| o != culprit && culprit_contrast(&p.iri, o));
        (!contrast, order(&p.iri))
    });
    chosen[culprit] = rows.iter().take(want).map(|(p, v)| (*p, v[0].clone())).collect();
    let culprit_preds: BTreeSet<&str> = chosen[culprit].iter().map(|(p, _)| p.iri.as_str()).collect();

    for s in (0..d.suspects.len()).filter(|&s| s != culprit) {
        let mut rows: Vec<&(&AllowedPredicate, Vec<String>)> = cands[s].rows.iter().collect();
        rows.sort_by_key(|(p, v)| {
            let against_culprit = culprit_preds.contains(p.iri.as_str()) && culprit_contrast(&p.iri, s);
            let differs = (0..d.suspects.len()).any(|o| o != s && cands[o].shown(&p.iri).is_some_and(|w| w != v[0]));
            (!against_culprit, !differs, order(&p.iri))
        });
        chosen[s] = rows.iter().take(want).map(|(p, v)| (*p, v[0].clone())).collect();
    }

    for (s, picks) in chosen.iter().enumerate() {
        if picks.len() < want {
            d.warnings.push(format!(
                "suspect {} has only {} admissible fact(s); wanted {}",
                d.suspects[s],
                picks.len(),
                want
            ));
        }
        let mut holders: Vec<NpcId> = Vec::new();
        let staff = d.staff.len();
        for k in 0..staff {
            holders.push(d.staff[(s + k) % staff].clone());
        }
        for h in d.holders[s].iter().skip(1).flatten() {
            if !holders.contains(h) {
                holders.push(h.clone());
            }
        }
        let subject = d.suspect_npcs[s].clone();
        for (j, (p, value)) in picks.iter().enumerate() {
            let id = FactId::numbered(d.game.facts.len());
            let holder = holders[j % holders.len()].clone();
            d.game.facts.push(Fact {
                id: id.clone(),
                subject: subject.clone(),
                predicate: p.iri.clone(),
                predicate_label: p.label.clone(),
                value_label: value.clone(),
                truthful: true,
                holder: FactHolder::Npc(holder.clone()),
            });
            d.attributes.insert(id.clone(), p.attribute_for(value));
            d.npc_mut(&holder).facts_held.push(id);
        }
    }
    Ok(())
}

/// One first-person statement per fact. The culprit swaps one statement for
/// another suspect's fact on the same predicate, so it contradicts a fact
/// the player can collect about the culprit.
///
/// When no such swap exists the culprit instead denies having the
/// predicate at all, which is recorded as a warning.
pub fn build_interrogation_scripts(
    graph: &KnowledgeGraph,
    d: &mut Draft,
    res: &Resources,
    style: ArticleStyle,
    rng: &mut GameRng,
) -> Result<(), AssembleError> {
    let grammar = &res.grammar;
    let mut scripts = Vec::new();
    for (i, suspect) in d.suspect_npcs.iter().enumerate() {
        let facts: Vec<&Fact> = d.game.facts_about(suspect).collect();
        let mut statements = Vec::new();
        for f in &facts {
            let text = render_line(
                grammar,
                "statement",
                &bindings([("attribute", d.attributes[&f.id].as_str())]),
                style,
                rng,
            )?;
            statements.push(Statement {
                text,
                truthful: true,
                claim: Claim {
                    predicate_label: f.predicate_label.clone(),
                    value_label: Some(f.value_label.clone()),
                },
                source_fact: Some(f.id.clone()),
            });
        }

        if suspect == &d.game.culprit {
            let own = admissible_facts(graph, &res.allowlist, &d.suspects[i]);
            let own_values = |p: &str| -> Vec<String> {
                own.iter()
                    .find(|(x, _)| x.iri == p)
                    .map(|(_, v)| v.clone())
                    .unwrap_or_default()
            };
            let mut swaps: Vec<(usize, &Fact)> = Vec::new();
            for (k, fc) in facts.iter().enumerate() {
                for fo in &d.game.facts {
                    if &fo.subject != suspect
                        && fo.predicate == fc.predicate
                        && fo.value_label != fc.value_label
                        && !own_values(&fo.predicate).contains(&fo.value_label)
                    {
                        swaps.push((k, fo));
                    }
                }
            }
            if swaps.is_empty() {
                let lacking = |p: &str| {
                    d.suspects.iter().enumerate().any(|(o, e)| {
                        o != i
                            && !admissible_facts(graph, &res.allowlist, e)
                                .iter()
                                .any(|(x, _)| x.iri == p)
                    })
                };
                let k = facts.iter().position(|f| lacking(&f.predicate)).unwrap_or(0);
                let noun = res
                    .allowlist
                    .get(&facts[k].predicate)
                    .map_or(facts[k].predicate_label.clone(), |p| p.noun.clone());
                statements[k] = Statement {
                    text: render_line(
                        grammar,
                        "statement-denial",
                        &bindings([("label", noun.as_str())]),
                        style,
                        rng,
                    )?,
                    truthful: false,
                    claim: Claim {
                        predicate_label: facts[k].predicate_label.clone(),
                        value_label: None,
                    },
                    source_fact: None,
                };
                d.warnings.push(format!(
                    "no other suspect shares a contrasting fact with the culprit {}; using a denial",
                    d.suspects[i]
                ));
            } else {
                let (k, fo) = swaps[rng.gen_range(0..swaps.len())];
                statements[k] = Statement {
                    text: render_line(
                        grammar,
                        "statement",
                        &bindings([("attribute", d.attributes[&fo.id].as_str())]),
                        style,
                        rng,
                    )?,
                    truthful: false,
                    claim: Claim {
                        predicate_label: fo.predicate_label.clone(),
                        value_label: Some(fo.value_label.clone()),
                    },
                    source_fact: Some(fo.id.clone()),
                };
            }
        }
        scripts.push(InterrogationScript {
            suspect: suspect.clone(),
            statements,
        });
    }
    d.game.interrogation_scripts = scripts;
    Ok(())
}
