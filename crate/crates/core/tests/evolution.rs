mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{fixture, pool_graph, res};
use mystery_core::kg::{EntityId, KnowledgeGraph, TripleObject};
use mystery_core::rng::seeded;
use mystery_core::suspects::{
    build_pool, cascade_select_scored, evolve, fitness, mutate, EvolutionConfig, FitnessPair, SuspectGenome,
};

const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";

/// Link count by scanning the triple list: identical `(predicate, object)`
/// pairs on both subjects, ignoring types and labels.
fn naive_links(g: &KnowledgeGraph, a: &EntityId, b: &EntityId) -> u64 {
    let of = |x: &EntityId| -> BTreeSet<(String, TripleObject)> {
        g.triples()
            .filter(|t| &t.subject == x && t.predicate != TYPE && t.predicate != LABEL)
            .map(|t| (t.predicate.clone(), t.object.clone()))
            .collect()
    };
    of(a).intersection(&of(b)).count() as u64
}

fn naive_fitness(g: &KnowledgeGraph, victim: &EntityId, members: &[EntityId]) -> (u64, u64) {
    let f1 = members.iter().map(|m| naive_links(g, victim, m)).sum();
    let mut f2 = 0;
    for (i, a) in members.iter().enumerate() {
        for b in &members[i + 1..] {
            f2 += naive_links(g, a, b);
        }
    }
    (f1, f2)
}

fn trios(pool: &[EntityId]) -> Vec<Vec<EntityId>> {
    let mut out = Vec::new();
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            for k in j + 1..pool.len() {
                out.push(vec![pool[i].clone(), pool[j].clone(), pool[k].clone()]);
            }
        }
    }
    out
}

fn pair(f: FitnessPair) -> (u64, u64) {
    (f.victim_links, f.inter_suspect_links)
}

#[test]
fn britney_trio_scores_six_and_twenty_three() {
    let started = Instant::now();
    let g = fixture("britney.nt");
    let victim = res("Britney_Spears");
    let trio = SuspectGenome::new([res("Diana_Ross"), res("Madonna"), res("Lady_Gaga")]).unwrap();
    assert_eq!(pair(fitness(&g, &victim, &trio)), (6, 23));
    assert_eq!(naive_fitness(&g, &victim, trio.members()), (6, 23));
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn evolution_finds_the_britney_trio() {
    let g = fixture("britney.nt");
    let victim = res("Britney_Spears");
    let pool = build_pool(&g, &victim, 3).unwrap();
    assert!(pool.len() > 3, "decoys belong in the pool");
    let run = evolve(
        &g,
        &victim,
        &pool,
        &EvolutionConfig {
            generations: 60,
            ..Default::default()
        },
    )
    .unwrap();
    let want: BTreeSet<EntityId> = [res("Diana_Ross"), res("Madonna"), res("Lady_Gaga")].into();
    assert_eq!(run.best.members().iter().cloned().collect::<BTreeSet<_>>(), want);
    assert_eq!(pair(run.fitness), (6, 23));
}

#[test]
fn fitness_matches_the_naive_count_on_every_trio() {
    for seed in 0..4 {
        let (g, victim) = pool_graph(seed);
        let pool = build_pool(&g, &victim, 3).unwrap();
        for t in trios(&pool.candidates) {
            let genome = SuspectGenome::new(t.clone()).unwrap();
            assert_eq!(pair(fitness(&g, &victim, &genome)), naive_fitness(&g, &victim, &t));
        }
    }
}

#[test]
fn cascade_keeps_the_top_half_then_the_top_half_again() {
    let (g, victim) = pool_graph(7);
    let pool = build_pool(&g, &victim, 3).unwrap();
    let scored: Vec<(SuspectGenome, FitnessPair)> = trios(&pool.candidates)
        .into_iter()
        .take(50)
        .map(|t| {
            let s = SuspectGenome::new(t).unwrap();
            let f = fitness(&g, &victim, &s);
            (s, f)
        })
        .collect();

    // Oracle: sort keys spelled out, truncation done by index.
    let mut first = scored.clone();
    first.sort_by_key(|(s, f)| (u64::MAX - f.victim_links, s.clone()));
    let first = &first[..first.len() / 2];
    let mut second = first.to_vec();
    second.sort_by_key(|(s, f)| (u64::MAX - f.inter_suspect_links, s.clone()));
    let want = &second[..second.len() / 2];

    assert_eq!(want.len(), 12, "a population of 50 keeps 12");
    assert_eq!(cascade_select_scored(scored), want.to_vec());
}

#[test]
fn mutation_swaps_exactly_one_member_for_an_outsider() {
    let (g, victim) = pool_graph(3);
    let pool = build_pool(&g, &victim, 3).unwrap();
    let parent = SuspectGenome::new(pool.candidates[..3].to_vec()).unwrap();
    let rng = &mut seeded(9);
    for _ in 0..200 {
        let child = mutate(&parent, &pool, rng);
        let before: BTreeSet<_> = parent.members().iter().collect();
        let after: BTreeSet<_> = child.members().iter().collect();
        assert_eq!(after.len(), 3);
        assert_eq!(before.intersection(&after).count(), 2);
        assert!(after.iter().all(|m| pool.candidates.contains(m)));
    }
}

#[test]
fn evolution_is_deterministic_and_never_regresses() {
    let (g, victim) = pool_graph(11);
    let pool = build_pool(&g, &victim, 3).unwrap();
    let cfg = EvolutionConfig {
        pop_size: 20,
        generations: 40,
        rng_seed: 5,
        ..Default::default()
    };
    let a = evolve(&g, &victim, &pool, &cfg).unwrap();
    let b = evolve(&g, &victim, &pool, &cfg).unwrap();
    assert_eq!(a.best, b.best);
    assert_eq!(a.ranked, b.ranked);
    assert_eq!(a.trace.len(), 41);
    assert!(a.trace.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(*a.trace.last().unwrap(), a.fitness);
    let ranked: BTreeSet<_> = a.ranked.iter().map(|(s, _)| s.clone()).collect();
    assert_eq!(ranked.len(), a.ranked.len());
}

#[test]
fn evolution_reaches_the_exhaustive_optimum() {
    let mut hits = 0;
    let mut runs = 0;
    for graph_seed in 0..5 {
        let (g, victim) = pool_graph(100 + graph_seed);
        let pool = build_pool(&g, &victim, 3).unwrap();
        assert!((10..=14).contains(&pool.len()));
        let best = trios(&pool.candidates)
            .iter()
            .map(|t| naive_fitness(&g, &victim, t))
            .max()
            .unwrap();
        for rng_seed in 0..4 {
            let cfg = EvolutionConfig {
                generations: 100,
                rng_seed,
                ..Default::default()
            };
            let got = pair(evolve(&g, &victim, &pool, &cfg).unwrap().fitness);
            assert!(got <= best);
            hits += usize::from(got == best);
            runs += 1;
        }
    }
    assert!(hits * 100 >= runs * 95, "{hits}/{runs}");
}

#[test]
fn bad_configs_are_rejected() {
    let (g, victim) = pool_graph(1);
    let pool = build_pool(&g, &victim, 3).unwrap();
    for cfg in [
        EvolutionConfig {
            n: 1,
            ..Default::default()
        },
        EvolutionConfig {
            pop_size: 3,
            ..Default::default()
        },
        EvolutionConfig {
            generations: 0,
            ..Default::default()
        },
        EvolutionConfig {
            survivor_fraction: 0.5,
            ..Default::default()
        },
    ] {
        assert!(evolve(&g, &victim, &pool, &cfg).is_err(), "{cfg:?}");
    }
    assert!(build_pool(&g, &victim, 40).is_err());
}
