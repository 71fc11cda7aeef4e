use std::collections::BTreeSet;

use mystery_core::kg::{
    parse_ntriples, write_ntriples, EntityId, KindConfig, KnowledgeGraph, Literal, Pair, Triple, TripleObject,
};
use proptest::prelude::*;

const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
const PREDICATES: [&str; 4] = ["http://ex.org/p0", "http://ex.org/p1", TYPE, LABEL];

fn e(i: usize) -> EntityId {
    EntityId::new(format!("http://ex.org/n{i}")).unwrap()
}

fn is_link(p: &str) -> bool {
    p != LABEL && p != TYPE
}

#[derive(Debug, Clone)]
enum Obj {
    Node(usize),
    Text(String, Option<String>),
}

fn triple_strategy() -> impl Strategy<Value = Triple> {
    let obj = prop_oneof![
        3 => (0usize..6).prop_map(Obj::Node),
        1 => (
            "[a-c\"\\\\\n\t é]{1,4}",
            prop::option::of(prop_oneof![Just("@en".to_string()), Just("http://ex.org/dt".to_string())]),
        )
            .prop_map(|(v, d)| Obj::Text(v, d)),
    ];
    (0usize..6, 0usize..4, obj).prop_map(|(s, p, o)| {
        let object = match o {
            Obj::Node(n) => TripleObject::Entity(e(n)),
            Obj::Text(value, datatype) => TripleObject::Literal(Literal { value, datatype }),
        };
        Triple::new(e(s), PREDICATES[p], object).unwrap()
    })
}

fn pairs(ts: &BTreeSet<Triple>, x: &EntityId) -> BTreeSet<Pair> {
    ts.iter()
        .filter(|t| &t.subject == x)
        .map(|t| (t.predicate.clone(), t.object.clone()))
        .collect()
}

fn naive_shared(ts: &BTreeSet<Triple>, a: &EntityId, b: &EntityId) -> BTreeSet<Pair> {
    pairs(ts, a)
        .intersection(&pairs(ts, b))
        .filter(|(p, _)| is_link(p))
        .cloned()
        .collect()
}

fn naive_neighbors(ts: &BTreeSet<Triple>, x: &EntityId) -> BTreeSet<EntityId> {
    let mut out = BTreeSet::new();
    for t in ts.iter().filter(|t| is_link(&t.predicate)) {
        if let TripleObject::Entity(o) = &t.object {
            if &t.subject == x && o != x {
                out.insert(o.clone());
            }
            if o == x && &t.subject != x {
                out.insert(t.subject.clone());
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn indexes_agree_with_a_linear_scan(triples in prop::collection::vec(triple_strategy(), 0..40)) {
        let mut g = KnowledgeGraph::with_kinds(KindConfig::default());
        for t in &triples {
            g.add_triple(t.clone());
        }
        let set: BTreeSet<Triple> = triples.iter().cloned().collect();
        prop_assert_eq!(g.len(), set.len());
        prop_assert_eq!(g.triples().cloned().collect::<BTreeSet<_>>(), set.clone());
        for t in &triples {
            prop_assert!(g.contains(t));
            prop_assert!(!g.add_triple(t.clone()));
        }
        prop_assert_eq!(g.len(), set.len());

        for i in 0..6 {
            let a = e(i);
            prop_assert_eq!(g.neighbors(&a), naive_neighbors(&set, &a));
            let sharing: BTreeSet<EntityId> = (0..6)
                .map(e)
                .filter(|b| *b != a && !naive_shared(&set, &a, b).is_empty())
                .collect();
            prop_assert_eq!(g.entities_sharing_pair_with(&a, None), sharing);
            for j in 0..6 {
                let b = e(j);
                let want = naive_shared(&set, &a, &b);
                prop_assert_eq!(g.shared_pair_count(&a, &b), want.len());
                prop_assert_eq!(g.shared_pairs(&b, &a), want.clone());
                prop_assert_eq!(g.shared_pairs(&a, &b), want);
                let linking = set
                    .iter()
                    .filter(|t| is_link(&t.predicate))
                    .filter(|t| {
                        (t.subject == a && t.object.as_entity() == Some(&b))
                            || (t.subject == b && t.object.as_entity() == Some(&a))
                    })
                    .map(|t| t.predicate.as_str())
                    .min();
                prop_assert_eq!(g.edge_predicate(&a, &b), linking);
            }
        }
    }

    #[test]
    fn ntriples_round_trip(triples in prop::collection::vec(triple_strategy(), 0..40)) {
        let g = KnowledgeGraph::from_triples(KindConfig::default(), triples.clone());
        let text = write_ntriples(&g);
        prop_assert_eq!(text.lines().count(), g.len());
        let back: BTreeSet<Triple> = parse_ntriples(&text).unwrap().into_iter().collect();
        prop_assert_eq!(back, triples.into_iter().collect::<BTreeSet<_>>());
    }
}

#[test]
fn labels_and_types_never_link_entities() {
    let g = KnowledgeGraph::from_triples(
        KindConfig::default(),
        vec![
            Triple::iri("http://ex.org/n0", TYPE, "http://dbpedia.org/ontology/Person").unwrap(),
            Triple::iri("http://ex.org/n1", TYPE, "http://dbpedia.org/ontology/Person").unwrap(),
            Triple::lit("http://ex.org/n0", LABEL, "Same").unwrap(),
            Triple::lit("http://ex.org/n1", LABEL, "Same").unwrap(),
        ],
    );
    assert_eq!(g.shared_pair_count(&e(0), &e(1)), 0);
    assert!(g.entities_sharing_pair_with(&e(0), None).is_empty());
}

#[test]
fn malformed_lines_report_their_line_number() {
    let doc = "<http://ex.org/a> <http://ex.org/p> <http://ex.org/b> .\n<http://ex.org/a> oops .\n";
    let err = parse_ntriples(doc).unwrap_err();
    assert_eq!(err.line, 2);
}
