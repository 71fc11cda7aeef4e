use rand::Rng;
use thiserror::Error;

use super::{bindings, ArticleStyle, ExpandError, Grammar, SlotBindings};
use crate::game::{
    ClueId, DialogNode, DialogNodeId, DialogTree, DialogTreeId, Effect, FactId, NpcId, ObjectRef, Speaker, Tier,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DialogError {
    #[error("grammar has no `{symbol}` rule for this clue target")]
    GrammarCoverage { symbol: String },
    #[error(transparent)]
    Expand(#[from] ExpandError),
}

/// How a clue target is spoken about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClueKind {
    Building,
    Concept,
    Place,
    Person,
}

impl ClueKind {
    pub fn of(target: &ObjectRef) -> Self {
        match target {
            ObjectRef::City(_) => ClueKind::Place,
            ObjectRef::Building(_) => ClueKind::Building,
            ObjectRef::Npc(_) => ClueKind::Person,
            ObjectRef::Item(_) => ClueKind::Concept,
        }
    }

    fn symbol_and_slot(self) -> (&'static str, &'static str) {
        match self {
            ClueKind::Building => ("clue-response-building", "building"),
            ClueKind::Concept => ("clue-response-concept", "thing"),
            ClueKind::Place => ("clue-response-place", "place"),
            ClueKind::Person => ("clue-response-person", "personObject"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClueLine {
    pub clue: ClueId,
    pub kind: ClueKind,
    pub target_name: String,
}

#[derive(Debug, Clone)]
pub struct FactLine {
    pub fact: FactId,
    pub suspect_name: String,
    pub attribute: String,
}

#[derive(Debug, Clone)]
pub struct NpcDialogInput {
    pub npc: NpcId,
    pub name: String,
    pub clues: Vec<ClueLine>,
    pub facts: Vec<FactLine>,
    pub residence: Option<String>,
    /// One flair attribute phrase about the NPC, if any.
    pub about: Option<String>,
}

struct Builder<'a, R: Rng + ?Sized> {
    prefix: String,
    grammar: &'a Grammar,
    style: ArticleStyle,
    rng: &'a mut R,
    nodes: Vec<DialogNode>,
}

impl<R: Rng + ?Sized> Builder<'_, R> {
    fn line(&mut self, symbol: &str, b: &SlotBindings) -> Result<String, DialogError> {
        if !self.grammar.has_symbol(symbol) {
            return Err(DialogError::GrammarCoverage {
                symbol: symbol.to_string(),
            });
        }
        Ok(self.style.apply(self.grammar.expand(symbol, b, self.rng)?))
    }

    fn node(
        &mut self,
        speaker: Speaker,
        tier: Tier,
        symbol: &str,
        b: &SlotBindings,
        effects: Vec<Effect>,
    ) -> Result<DialogNodeId, DialogError> {
        let text = self.line(symbol, b)?;
        let id = DialogNodeId(format!("{}.{}", self.prefix, self.nodes.len()));
        self.nodes.push(DialogNode {
            id: id.clone(),
            speaker,
            text,
            tier,
            children: Vec::new(),
            effects,
        });
        Ok(id)
    }

    fn link(&mut self, from: &DialogNodeId, to: &DialogNodeId) {
        let node = self.nodes.iter_mut().find(|n| &n.id == from).expect("node exists");
        node.children.push(to.clone());
    }

    /// Player query then NPC response, returning to the hub.
    fn branch(
        &mut self,
        hub: &DialogNodeId,
        tier: Tier,
        query: &str,
        response: &str,
        b: &SlotBindings,
        effects: Vec<Effect>,
    ) -> Result<String, DialogError> {
        let none = SlotBindings::new();
        let q = self.node(Speaker::Player, tier, query, &none, Vec::new())?;
        let r = self.node(Speaker::Npc, tier, response, b, effects)?;
        self.link(hub, &q);
        self.link(&q, &r);
        self.link(&r, hub);
        Ok(self.nodes.last().expect("just pushed").text.clone())
    }
}

/// Greeting, then the hub exchange, then one branch per topic. Every branch
/// response leads back to the hub.
///
/// Returns the tree and the spoken text of each clue line.
pub fn build_dialog_tree<R: Rng + ?Sized>(
    id: DialogTreeId,
    input: &NpcDialogInput,
    grammar: &Grammar,
    style: ArticleStyle,
    rng: &mut R,
) -> Result<(DialogTree, Vec<(ClueId, String)>), DialogError> {
    let mut b = Builder {
        prefix: id.to_string(),
        grammar,
        style,
        rng,
        nodes: Vec::new(),
    };
    let none = SlotBindings::new();
    let root = b.node(Speaker::Npc, Tier::Essential, "greeting-to-player", &none, Vec::new())?;
    let ask = b.node(Speaker::Player, Tier::Essential, "central-hub", &none, Vec::new())?;
    let hub = b.node(Speaker::Npc, Tier::Essential, "central-hub-response", &none, Vec::new())?;
    b.link(&root, &ask);
    b.link(&ask, &hub);

    b.branch(
        &hub,
        Tier::Flair,
        "name-query",
        "name-response",
        &bindings([("personName", input.name.as_str())]),
        Vec::new(),
    )?;

    let mut clue_texts = Vec::new();
    for c in &input.clues {
        let (symbol, slot) = c.kind.symbol_and_slot();
        let text = b.branch(
            &hub,
            Tier::Essential,
            "clue-query",
            symbol,
            &bindings([(slot, c.target_name.as_str())]),
            vec![Effect::RevealClue(c.clue.clone())],
        )?;
        clue_texts.push((c.clue.clone(), text));
    }

    for f in &input.facts {
        b.branch(
            &hub,
            Tier::FactGiving,
            "suspect-fact-query",
            "suspect-fact-response",
            &bindings([
                ("suspectName", f.suspect_name.as_str()),
                ("attribute", f.attribute.as_str()),
            ]),
            vec![Effect::GrantFact(f.fact.clone())],
        )?;
    }

    match &input.residence {
        Some(place) => b.branch(
            &hub,
            Tier::Flair,
            "residence-query",
            "speculation-response",
            &bindings([("place", place.as_str())]),
            Vec::new(),
        )?,
        None => b.branch(
            &hub,
            Tier::Flair,
            "residence-query",
            "speculation-response-unknown",
            &none,
            Vec::new(),
        )?,
    };

    if let Some(attribute) = &input.about {
        b.branch(
            &hub,
            Tier::Flair,
            "about-query",
            "about-response",
            &bindings([("attribute", attribute.as_str())]),
            Vec::new(),
        )?;
    }

    let tree = DialogTree {
        id,
        npc: input.npc.clone(),
        root,
        hub,
        nodes: b.nodes,
    };
    Ok((tree, clue_texts))
}
