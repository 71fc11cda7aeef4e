//! Suspect pooling and the μ+λ evolution strategy with cascading elitism.
//!
//! A genome is a set of `n` suspects drawn from the pool of people sharing at
//! least one `(predicate, object)` pair with the victim. Two objectives are
//! maximised: links between the victim and the suspects, then links among
//! the suspects. Selection halves the population by the first objective and
//! halves the remainder by the second.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::{EntityId, EntityKind, KnowledgeGraph};
use crate::rng::GameRng;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectError {
    #[error("generation infeasible: victim {victim} has {pool_size} candidate suspect(s), {required} required")]
    GenerationInfeasible {
        victim: EntityId,
        pool_size: usize,
        required: usize,
    },
    #[error("invalid evolution config: {0}")]
    InvalidConfig(String),
    #[error("invalid genome: {0}")]
    InvalidGenome(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuspectPool {
    pub victim: EntityId,
    pub candidates: Vec<EntityId>,
}

impl SuspectPool {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// People sharing at least one link with the victim, in IRI order.
pub fn build_pool(graph: &KnowledgeGraph, victim: &EntityId, n: usize) -> Result<SuspectPool, SelectError> {
    let candidates: Vec<EntityId> = graph
        .entities_sharing_pair_with(victim, Some(EntityKind::Person))
        .into_iter()
        .collect();
    if candidates.len() < n {
        return Err(SelectError::GenerationInfeasible {
            victim: victim.clone(),
            pool_size: candidates.len(),
            required: n,
        });
    }
    Ok(SuspectPool {
        victim: victim.clone(),
        candidates,
    })
}

/// A set of distinct suspects, kept sorted so equal sets compare equal and
/// ordering between genomes is the lexicographic order of member IRIs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SuspectGenome(Vec<EntityId>);

impl SuspectGenome {
    pub fn new(members: impl IntoIterator<Item = EntityId>) -> Result<Self, SelectError> {
        let mut v: Vec<EntityId> = members.into_iter().collect();
        let len = v.len();
        v.sort();
        v.dedup();
        if v.len() != len {
            return Err(SelectError::InvalidGenome("duplicate suspect".into()));
        }
        if v.is_empty() {
            return Err(SelectError::InvalidGenome("empty genome".into()));
        }
        Ok(SuspectGenome(v))
    }

    pub fn members(&self) -> &[EntityId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: &EntityId) -> bool {
        self.0.binary_search(e).is_ok()
    }
}

impl fmt::Display for SuspectGenome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|e| e.local_name()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub n: usize,
    pub pop_size: usize,
    pub generations: usize,
    pub rng_seed: u64,
    pub survivor_fraction: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            n: 3,
            pop_size: 50,
            generations: 500,
            rng_seed: 0,
            survivor_fraction: 0.25,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), SelectError> {
        let bad = |m: &str| Err(SelectError::InvalidConfig(m.to_string()));
        if self.n < 2 {
            return bad("n must be at least 2");
        }
        if self.pop_size < 4 {
            return bad("population size must be at least 4");
        }
        if self.generations == 0 {
            return bad("generations must be at least 1");
        }
        if self.survivor_fraction != 0.25 {
            return bad("cascading elitism keeps exactly a quarter of the population");
        }
        Ok(())
    }
}

/// `(victim links, inter-suspect links)`; the derived ordering is
/// lexicographic, matching the priority of the two objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FitnessPair {
    pub victim_links: u64,
    pub inter_suspect_links: u64,
}

pub fn fitness1_victim_links(graph: &KnowledgeGraph, victim: &EntityId, g: &SuspectGenome) -> u64 {
    g.members()
        .iter()
        .map(|s| graph.shared_pair_count(victim, s) as u64)
        .sum()
}

pub fn fitness2_inter_links(graph: &KnowledgeGraph, g: &SuspectGenome) -> u64 {
    let m = g.members();
    let mut total = 0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            total += graph.shared_pair_count(&m[i], &m[j]) as u64;
        }
    }
    total
}

pub fn fitness(graph: &KnowledgeGraph, victim: &EntityId, g: &SuspectGenome) -> FitnessPair {
    FitnessPair {
        victim_links: fitness1_victim_links(graph, victim, g),
        inter_suspect_links: fitness2_inter_links(graph, g),
    }
}

/// Memoising fitness evaluator; link counts are cached per entity and per
/// entity pair.
struct LinkCounter<'g> {
    graph: &'g KnowledgeGraph,
    victim: &'g EntityId,
    victim_links: HashMap<EntityId, u64>,
    pair_links: HashMap<(EntityId, EntityId), u64>,
}

impl<'g> LinkCounter<'g> {
    fn new(graph: &'g KnowledgeGraph, victim: &'g EntityId) -> Self {
        LinkCounter {
            graph,
            victim,
            victim_links: HashMap::new(),
            pair_links: HashMap::new(),
        }
    }

    fn score(&mut self, g: &SuspectGenome) -> FitnessPair {
        let m = g.members();
        let mut f1 = 0;
        for s in m {
            f1 += *self
                .victim_links
                .entry(s.clone())
                .or_insert_with(|| self.graph.shared_pair_count(self.victim, s) as u64);
        }
        let mut f2 = 0;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                f2 += *self
                    .pair_links
                    .entry((m[i].clone(), m[j].clone()))
                    .or_insert_with(|| self.graph.shared_pair_count(&m[i], &m[j]) as u64);
            }
        }
        FitnessPair {
            victim_links: f1,
            inter_suspect_links: f2,
        }
    }
}

/// Survivor selection over pre-scored genomes: keep the better half by victim
/// links, then the better half of those by inter-suspect links. Ties at both
/// stages fall back to lexicographic genome order.
pub fn cascade_select_scored(mut scored: Vec<(SuspectGenome, FitnessPair)>) -> Vec<(SuspectGenome, FitnessPair)> {
    let half = scored.len() / 2;
    scored.sort_by(|(ga, fa), (gb, fb)| fb.victim_links.cmp(&fa.victim_links).then_with(|| ga.cmp(gb)));
    scored.truncate(half);
    let quarter = scored.len() / 2;
    scored.sort_by(|(ga, fa), (gb, fb)| {
        fb.inter_suspect_links
            .cmp(&fa.inter_suspect_links)
            .then_with(|| ga.cmp(gb))
    });
    scored.truncate(quarter);
    scored
}

pub fn cascade_select(population: &[SuspectGenome], graph: &KnowledgeGraph, victim: &EntityId) -> Vec<SuspectGenome> {
    let scored = population
        .iter()
        .map(|g| (g.clone(), fitness(graph, victim, g)))
        .collect();
    cascade_select_scored(scored).into_iter().map(|(g, _)| g).collect()
}

/// Replaces one uniformly chosen member with a uniformly chosen pool entry
/// not already in the genome.
///
/// The pool must hold more candidates than the genome has members.
pub fn mutate(g: &SuspectGenome, pool: &SuspectPool, rng: &mut GameRng) -> SuspectGenome {
    assert!(pool.len() > g.len(), "mutation needs a pool larger than the genome");
    let slot = rng.gen_range(0..g.len());
    let replacement = loop {
        let c = &pool.candidates[rng.gen_range(0..pool.len())];
        if !g.contains(c) {
            break c.clone();
        }
    };
    let mut members = g.0.clone();
    members[slot] = replacement;
    members.sort();
    SuspectGenome(members)
}

fn random_genome(pool: &SuspectPool, n: usize, rng: &mut GameRng) -> SuspectGenome {
    let idx = rand::seq::index::sample(rng, pool.len(), n);
    let mut members: Vec<EntityId> = idx.iter().map(|i| pool.candidates[i].clone()).collect();
    members.sort();
    SuspectGenome(members)
}

#[derive(Debug, Clone, Serialize)]
pub struct Evolution {
    pub best: SuspectGenome,
    pub fitness: FitnessPair,
    /// Distinct genomes of the final population, best first.
    pub ranked: Vec<(SuspectGenome, FitnessPair)>,
    /// Best fitness present in the population after initialisation and
    /// after each generation.
    pub trace: Vec<FitnessPair>,
}

fn better(a: &(SuspectGenome, FitnessPair), b: &(SuspectGenome, FitnessPair)) -> Ordering {
    // Greater fitness first, then lexicographically smaller genome.
    (b.1, Reverse(&b.0)).cmp(&(a.1, Reverse(&a.0)))
}

/// Runs the evolution strategy and returns the best genome of the final
/// population under lexicographic `(victim links, inter-suspect links)`.
///
/// Each generation keeps the cascade survivors unmutated and refills the
/// population with mutated copies of them, round-robin. The best genome seen
/// so far is carried into the survivors if the cascade dropped it, so the
/// population's best never gets worse.
pub fn evolve(
    graph: &KnowledgeGraph,
    victim: &EntityId,
    pool: &SuspectPool,
    cfg: &EvolutionConfig,
) -> Result<Evolution, SelectError> {
    cfg.validate()?;
    let rng = &mut crate::rng::seeded(cfg.rng_seed);
    if pool.len() < cfg.n {
        return Err(SelectError::GenerationInfeasible {
            victim: victim.clone(),
            pool_size: pool.len(),
            required: cfg.n,
        });
    }
    let mut counter = LinkCounter::new(graph, victim);
    if pool.len() == cfg.n {
        let only = SuspectGenome::new(pool.candidates.iter().cloned())?;
        let f = counter.score(&only);
        return Ok(Evolution {
            best: only.clone(),
            fitness: f,
            ranked: vec![(only, f)],
            trace: vec![f; cfg.generations + 1],
        });
    }

    let mut population: Vec<(SuspectGenome, FitnessPair)> = (0..cfg.pop_size)
        .map(|_| {
            let g = random_genome(pool, cfg.n, rng);
            let f = counter.score(&g);
            (g, f)
        })
        .collect();
    let mut champion = population
        .iter()
        .min_by(|a, b| better(a, b))
        .cloned()
        .expect("non-empty population");
    let mut trace = vec![champion.1];

    for _ in 0..cfg.generations {
        let mut survivors = cascade_select_scored(population);
        if !survivors.iter().any(|(g, _)| *g == champion.0) {
            survivors.push(champion.clone());
        }
        let mut next = survivors.clone();
        let mut i = 0;
        while next.len() < cfg.pop_size {
            let parent = &survivors[i % survivors.len()].0;
            let child = mutate(parent, pool, rng);
            let f = counter.score(&child);
            next.push((child, f));
            i += 1;
        }
        population = next;
        let gen_best = population
            .iter()
            .min_by(|a, b| better(a, b))
            .cloned()
            .expect("non-empty population");
        if better(&gen_best, &champion) == Ordering::Less {
            champion = gen_best;
        }
        trace.push(champion.1);
    }

    let mut ranked: Vec<(SuspectGenome, FitnessPair)> = population;
    ranked.sort_by(better);
    let mut seen = BTreeSet::new();
    ranked.retain(|(g, _)| seen.insert(g.clone()));
    let (best, fitness) = ranked[0].clone();
    Ok(Evolution {
        best,
        fitness,
        ranked,
        trace,
    })
}

/// Uniformly picks the culprit among the genome's members.
pub fn pick_culprit(g: &SuspectGenome, rng: &mut GameRng) -> EntityId {
    g.members()[rng.gen_range(0..g.len())].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{Triple, TripleObject};
    use crate::rng::seeded;

    fn e(s: &str) -> EntityId {
        EntityId::new(format!("http://ex.org/{s}")).unwrap()
    }

    fn genome(names: &[&str]) -> SuspectGenome {
        SuspectGenome::new(names.iter().map(|n| e(n))).unwrap()
    }

    fn pool(names: &[&str]) -> SuspectPool {
        SuspectPool {
            victim: e("victim"),
            candidates: names.iter().map(|n| e(n)).collect(),
        }
    }

    fn person(g: &mut KnowledgeGraph, s: &str) {
        g.add_triple(
            Triple::iri(
                e(s).as_str(),
                "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
                "http://dbpedia.org/ontology/Person",
            )
            .unwrap(),
        );
    }

    fn share(g: &mut KnowledgeGraph, s: &str, value: &str) {
        g.add_triple(Triple::new(e(s), "http://ex.org/p", TripleObject::literal(value)).unwrap());
    }

    #[test]
    fn empty_pool_is_infeasible() {
        let mut g = KnowledgeGraph::new();
        person(&mut g, "victim");
        share(&mut g, "victim", "lonely");
        assert!(matches!(
            build_pool(&g, &e("victim"), 3),
            Err(SelectError::GenerationInfeasible { pool_size: 0, .. })
        ));
    }

    #[test]
    fn pool_excludes_places_and_victim() {
        let mut g = KnowledgeGraph::new();
        for s in ["victim", "a", "b"] {
            person(&mut g, s);
            share(&mut g, s, "Springfield");
        }
        g.add_triple(
            Triple::iri(
                e("town").as_str(),
                "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
                "http://dbpedia.org/ontology/Place",
            )
            .unwrap(),
        );
        share(&mut g, "town", "Springfield");
        let p = build_pool(&g, &e("victim"), 2).unwrap();
        assert_eq!(p.candidates, vec![e("a"), e("b")]);
    }

    #[test]
    fn unit_links_sum_to_n() {
        let mut g = KnowledgeGraph::new();
        for s in ["victim", "a", "b", "c"] {
            share(&mut g, s, "common");
            share(&mut g, s, &format!("own-{s}"));
        }
        assert_eq!(fitness1_victim_links(&g, &e("victim"), &genome(&["a", "b", "c"])), 3);
    }

    #[test]
    fn unlinked_suspects_score_zero() {
        let mut g = KnowledgeGraph::new();
        for s in ["a", "b", "c"] {
            share(&mut g, s, &format!("own-{s}"));
        }
        assert_eq!(fitness2_inter_links(&g, &genome(&["a", "b", "c"])), 0);
    }

    #[test]
    fn genome_rejects_duplicates() {
        assert!(SuspectGenome::new([e("a"), e("a")]).is_err());
    }

    fn f(v: u64, i: u64) -> FitnessPair {
        FitnessPair {
            victim_links: v,
            inter_suspect_links: i,
        }
    }

    #[test]
    fn cascade_four_keeps_doubly_best() {
        let scored = vec![
            (genome(&["a", "b"]), f(1, 9)),
            (genome(&["a", "c"]), f(4, 2)),
            (genome(&["a", "d"]), f(3, 1)),
            (genome(&["b", "c"]), f(2, 8)),
        ];
        let out = cascade_select_scored(scored);
        assert_eq!(out, vec![(genome(&["a", "c"]), f(4, 2))]);
    }

    #[test]
    fn cascade_identical_population() {
        let g = genome(&["a", "b"]);
        let out = cascade_select_scored(vec![(g.clone(), f(1, 1)); 8]);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|(x, _)| *x == g));
    }

    #[test]
    fn cascade_eight_matches_hand_trace() {
        // Stage 1 keeps the four with the most victim links: g1(9), g4(8),
        // g6(7) and, of g2/g7 tied at 6, the lexicographically smaller g2.
        // Stage 2 ranks those by inter links: g6(5), g2(5) tie -> g2 first,
        // then g6; g1(3), g4(1) are dropped.
        let g1 = genome(&["a", "b"]);
        let g2 = genome(&["a", "c"]);
        let g3 = genome(&["a", "d"]);
        let g4 = genome(&["b", "c"]);
        let g5 = genome(&["b", "d"]);
        let g6 = genome(&["c", "d"]);
        let g7 = genome(&["c", "e"]);
        let g8 = genome(&["d", "e"]);
        let scored = vec![
            (g1.clone(), f(9, 3)),
            (g2.clone(), f(6, 5)),
            (g3.clone(), f(2, 20)),
            (g4.clone(), f(8, 1)),
            (g5.clone(), f(5, 9)),
            (g6.clone(), f(7, 5)),
            (g7.clone(), f(6, 30)),
            (g8.clone(), f(1, 0)),
        ];
        let out: Vec<_> = cascade_select_scored(scored).into_iter().map(|(g, _)| g).collect();
        assert_eq!(out, vec![g2, g6]);
    }

    #[test]
    fn mutate_with_one_spare_candidate_is_forced() {
        let p = pool(&["a", "b", "c", "d"]);
        let g = genome(&["a", "b", "c"]);
        let mut rng = seeded(3);
        for _ in 0..50 {
            let m = mutate(&g, &p, &mut rng);
            assert!(m.contains(&e("d")));
            assert_eq!(m.members().iter().filter(|x| !g.contains(x)).count(), 1);
        }
    }

    #[test]
    fn mutation_replacements_are_uniform() {
        // 10,000 mutations of {a,b,c} over a pool of 8: each of the 5
        // eligible replacements should appear with p = 1/5.
        let p = pool(&["a", "b", "c", "d", "e", "f", "g", "h"]);
        let g = genome(&["a", "b", "c"]);
        let mut rng = seeded(11);
        let mut counts: HashMap<EntityId, u32> = HashMap::new();
        let trials = 10_000;
        for _ in 0..trials {
            let m = mutate(&g, &p, &mut rng);
            let added: Vec<_> = m.members().iter().filter(|x| !g.contains(x)).collect();
            assert_eq!(added.len(), 1);
            assert_eq!(m.len(), 3);
            *counts.entry(added[0].clone()).or_default() += 1;
        }
        assert_eq!(counts.len(), 5);
        let expected = trials as f64 / 5.0;
        let sigma = (trials as f64 * 0.2 * 0.8).sqrt();
        for (k, c) in counts {
            assert!((c as f64 - expected).abs() <= 3.0 * sigma, "{k}: {c}");
        }
    }

    #[test]
    fn culprit_choice_is_uniform_and_seeded() {
        let g = genome(&["a", "b", "c"]);
        let mut counts: HashMap<EntityId, u32> = HashMap::new();
        for seed in 0..3000u64 {
            *counts.entry(pick_culprit(&g, &mut seeded(seed))).or_default() += 1;
        }
        let sigma = (3000.0f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for c in counts.values() {
            assert!((*c as f64 - 1000.0).abs() <= 3.0 * sigma);
        }
        assert_eq!(pick_culprit(&g, &mut seeded(5)), pick_culprit(&g, &mut seeded(5)));
        let single = genome(&["solo"]);
        assert_eq!(pick_culprit(&single, &mut seeded(1)), e("solo"));
    }

    #[test]
    fn singleton_search_space() {
        let mut g = KnowledgeGraph::new();
        for s in ["victim", "a", "b", "c"] {
            share(&mut g, s, "x");
        }
        let p = pool(&["a", "b", "c"]);
        let out = evolve(&g, &e("victim"), &p, &EvolutionConfig::default()).unwrap();
        assert_eq!(out.best, genome(&["a", "b", "c"]));
        assert_eq!(out.fitness, f(3, 3));
    }

    #[test]
    fn config_validation() {
        let ok = EvolutionConfig::default();
        assert!(ok.validate().is_ok());
        assert!(EvolutionConfig { n: 1, ..ok }.validate().is_err());
        assert!(EvolutionConfig { pop_size: 3, ..ok }.validate().is_err());
        assert!(EvolutionConfig { generations: 0, ..ok }.validate().is_err());
        assert!(EvolutionConfig {
            survivor_fraction: 0.5,
            ..ok
        }
        .validate()
        .is_err());
    }
}
