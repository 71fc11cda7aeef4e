#![allow(dead_code)]

use std::path::PathBuf;

use mystery_core::assemble::Resources;
use mystery_core::game::GameDefinition;
use mystery_core::ingest::load_dump;
use mystery_core::kg::{EntityId, KindConfig, KnowledgeGraph, Triple, TripleObject};
use mystery_core::pipeline::{generate, Generated, PipelineConfig};
use mystery_core::suspects::EvolutionConfig;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const R: &str = "http://dbpedia.org/resource/";
pub const O: &str = "http://dbpedia.org/ontology/";
pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

pub fn fixture_path(name: &str) -> PathBuf {
    // Also included from the cli crate's tests, hence the detour.
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub fn fixture(name: &str) -> KnowledgeGraph {
    load_dump(&fixture_path(name), KindConfig::default()).expect("fixture loads")
}

/// A hand-written two-suspect game: Alice (culprit, locked house) and Bob.
pub fn mini() -> GameDefinition {
    GameDefinition::load(&fixture_path("mini.json")).expect("mini game loads")
}

/// Pipeline settings small enough to run hundreds of times in a test.
pub fn quick_config(victim: &str, seed: u64) -> PipelineConfig {
    PipelineConfig {
        victim: victim.to_string(),
        rng_seed: seed,
        evolution: EvolutionConfig {
            pop_size: 8,
            generations: 20,
            ..EvolutionConfig::default()
        },
        ..PipelineConfig::default()
    }
}

pub fn generated(seed: u64) -> Generated {
    let g = synthetic_graph(seed);
    generate(&g, &Resources::default(), &quick_config(&format!("{R}Victim"), seed)).expect("synthetic graphs generate")
}

pub fn res(local: &str) -> EntityId {
    EntityId::new(format!("{R}{local}")).unwrap()
}

fn add(g: &mut KnowledgeGraph, s: &str, p: &str, o: &str) {
    g.add_triple(Triple::new(EntityId::new(s).unwrap(), p, TripleObject::entity(o).unwrap()).unwrap());
}

fn add_lit(g: &mut KnowledgeGraph, s: &str, p: &str, o: &str) {
    g.add_triple(Triple::new(EntityId::new(s).unwrap(), p, TripleObject::literal(o)).unwrap());
}

/// A random DBpedia-shaped neighbourhood around `res("Victim")`.
///
/// Every person shares a genre with the victim and has a nationality of
/// their own, so any culprit can be caught lying about it. Places,
/// settlements and works are scattered between them to vary path shapes.
pub fn synthetic_graph(seed: u64) -> KnowledgeGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = KnowledgeGraph::with_kinds(KindConfig::default());
    let victim = format!("{R}Victim");
    add(&mut g, &victim, TYPE, &format!("{O}Person"));
    add_lit(&mut g, &victim, LABEL, "Vera Victim");

    let n_people = rng.gen_range(5..9);
    let n_towns = rng.gen_range(2..5);
    let n_places = rng.gen_range(1..5);
    let n_works = rng.gen_range(2..6);
    let towns: Vec<String> = (0..n_towns).map(|i| format!("{R}Town_{i}")).collect();
    let places: Vec<String> = (0..n_places).map(|i| format!("{R}Hall_{i}")).collect();
    let works: Vec<String> = (0..n_works).map(|i| format!("{R}Work_{i}")).collect();
    let genres: Vec<String> = (0..3).map(|i| format!("{R}Genre_{i}")).collect();
    for (i, t) in towns.iter().enumerate() {
        add(&mut g, t, TYPE, &format!("{O}Town"));
        add_lit(&mut g, t, LABEL, &format!("Town {i}"));
    }
    for p in &places {
        add(&mut g, p, TYPE, &format!("{O}Building"));
    }
    for p in &places {
        let t = towns.choose(&mut rng).unwrap();
        add(&mut g, p, &format!("{O}location"), t);
    }
    add(&mut g, &victim, &format!("{O}birthPlace"), &towns[0]);
    for gen in &genres {
        add(&mut g, &victim, &format!("{O}genre"), gen);
    }

    for i in 0..n_people {
        let p = format!("{R}Person_{i}");
        add(&mut g, &p, TYPE, &format!("{O}Person"));
        add_lit(&mut g, &p, LABEL, &format!("Person {i}"));
        add(&mut g, &p, &format!("{O}genre"), genres.choose(&mut rng).unwrap());
        add(&mut g, &p, &format!("{O}birthPlace"), towns.choose(&mut rng).unwrap());
        add(&mut g, &p, &format!("{O}nationality"), &format!("{R}Land_{i}"));
        for w in works.choose_multiple(&mut rng, 2) {
            add(&mut g, &p, &format!("{O}knownFor"), w);
        }
        if rng.gen_bool(0.5) {
            add(&mut g, &p, &format!("{O}employer"), places.choose(&mut rng).unwrap());
        }
    }
    for w in &works {
        if rng.gen_bool(0.5) {
            add(&mut g, w, &format!("{O}location"), places.choose(&mut rng).unwrap());
        }
    }
    g
}

/// A victim with `10..=14` person candidates whose attributes are drawn from
/// small value sets, so link counts overlap and ties are common.
pub fn pool_graph(seed: u64) -> (KnowledgeGraph, EntityId) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = KnowledgeGraph::with_kinds(KindConfig::default());
    let victim = format!("{R}Victim");
    let n = rng.gen_range(10..=14);
    let people: Vec<String> = std::iter::once(victim.clone())
        .chain((0..n).map(|i| format!("{R}Candidate_{i:02}")))
        .collect();
    for p in &people {
        add(&mut g, p, TYPE, &format!("{O}Person"));
        // Every candidate shares at least this genre with the victim.
        add(&mut g, p, &format!("{O}genre"), &format!("{R}genre_0"));
        for attr in ["genre", "birthPlace", "occupation", "award", "employer"] {
            for _ in 0..rng.gen_range(0..3) {
                add(
                    &mut g,
                    p,
                    &format!("{O}{attr}"),
                    &format!("{R}{attr}_{}", rng.gen_range(1..4)),
                );
            }
        }
    }
    (g, EntityId::new(victim).unwrap())
}
