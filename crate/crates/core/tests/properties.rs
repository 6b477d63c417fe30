//! Randomized invariants of nested collections, seeds and mutation.

use lpgraph_core::acyclic::{y_by_determinant, y_by_enumeration, Basis};
use lpgraph_core::graphlp::{build_algebra, initial_seed, parse_seed, BuildOptions, Engine};
use lpgraph_core::lpcore::{seeds_equivalent, seeds_equivalent_unordered, Seed};
use lpgraph_core::nested::{enumerate_maximal_collections, DEFAULT_ENUMERATION_CAP};
use lpgraph_core::{Digraph, LaurentPoly, MaximalNestedCollection};
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        let bits = n * (n - 1);
        (Just(n), 0u64..(1u64 << bits)).prop_map(|(n, code)| Digraph::from_code(n, code))
    })
}

/// A seed reached from the initial seed by a short walk.
fn walked(g: &Digraph, walk: &[usize]) -> Seed {
    let n = g.n();
    initial_seed(g).mutate_path(&walk.iter().map(|d| d % n + 1).collect::<Vec<_>>()).unwrap()
}

fn flip_signs(t: &Seed, mask: u32) -> Seed {
    let ex: Vec<LaurentPoly> = t.exchanges().iter().enumerate().map(|(k, f)| if mask >> k & 1 == 1 { -f } else { f.clone() }).collect();
    Seed::new(t.vars().to_vec(), ex).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn collection_moves_are_invertible(g in graph(5), pick in any::<prop::sample::Index>(), s in 1usize..=5) {
        let all = enumerate_maximal_collections(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        let m = pick.get(&all);
        let s = (s - 1) % g.n() + 1;
        let (_, m2) = m.mutate(&g, s).unwrap();
        prop_assert_eq!(MaximalNestedCollection::from_sets(&g, &m2.sets()).unwrap(), m2.clone());
        let back = m.inverse_direction(s);
        prop_assert_eq!(&m2.mutate(&g, back).unwrap().1, m);
    }

    #[test]
    fn seed_mutation_is_an_involution(g in graph(4), walk in prop::collection::vec(0usize..4, 0..4), i in 0usize..4) {
        let t = walked(&g, &walk);
        let i = i % g.n() + 1;
        let back = t.mutate(i).unwrap().mutate(i).unwrap();
        prop_assert!(seeds_equivalent(&back, &t));
    }

    #[test]
    fn hat_f_determines_f(g in graph(4), walk in prop::collection::vec(0usize..4, 0..4)) {
        let t = walked(&g, &walk);
        for i in 1..=t.rank() {
            prop_assert_eq!(&(&t.hat_f(i) * &t.hat_denominator(i)), t.exchange(i));
            prop_assert!(t.hat_f_characterized(i));
        }
    }

    #[test]
    fn seed_equivalence_is_an_equivalence(g in graph(4), walk in prop::collection::vec(0usize..4, 0..3), m1 in 0u32..16, m2 in 0u32..16, i in 0usize..4) {
        let t = walked(&g, &walk);
        let (a, b) = (flip_signs(&t, m1), flip_signs(&t, m2));
        prop_assert!(seeds_equivalent(&t, &t));
        prop_assert_eq!(seeds_equivalent(&a, &b), seeds_equivalent(&b, &a));
        prop_assert!(seeds_equivalent(&t, &a) && seeds_equivalent(&a, &b) && seeds_equivalent(&t, &b));
        let u = t.mutate(i % g.n() + 1).unwrap();
        prop_assert_eq!(seeds_equivalent(&t, &u), seeds_equivalent(&u, &t));
        if seeds_equivalent(&t, &u) {
            prop_assert!(seeds_equivalent(&a, &u));
        }
    }

    #[test]
    fn y_by_enumeration_matches_minor(g in graph(5), mask in 1u64..32) {
        let s = lpgraph_core::VertexSet::from_mask(mask & ((1u64 << g.n()) - 1));
        prop_assume!(!s.is_empty());
        prop_assert_eq!(y_by_enumeration(&g, s), y_by_determinant(&g, s, Basis::Expanded));
    }

    #[test]
    fn direct_seed_matches_replayed_activations(g in graph(4), order in Just((1..=4).collect::<Vec<usize>>()).prop_shuffle(), len in 0usize..=4) {
        let seq: Vec<usize> = order.into_iter().filter(|&v| v <= g.n()).take(len).collect();
        let m = MaximalNestedCollection::from_activations(&g, &seq).unwrap();
        let direct = Engine::new(&g).seed_for_collection(&m).unwrap();
        let replay = initial_seed(&g).mutate_path(&seq).unwrap();
        prop_assert!(seeds_equivalent_unordered(&direct, &replay));
    }
}

#[test]
fn seed_json_round_trips_on_running_example() {
    let alg = build_algebra(&Digraph::example(), BuildOptions::default()).unwrap();
    for t in 0..alg.seed_count() {
        let j = alg.seed_json(t);
        let text = serde_json::to_string(&j).unwrap();
        let (back, names) = parse_seed(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, alg.seeds[t]);
        assert_eq!(names, alg.names[t]);
    }
}

#[test]
fn running_example_seeds_pairwise_inequivalent() {
    let alg = build_algebra(&Digraph::example(), BuildOptions::default()).unwrap();
    for a in 0..alg.seed_count() {
        for b in a + 1..alg.seed_count() {
            assert!(!seeds_equivalent_unordered(&alg.seeds[a], &alg.seeds[b]), "{a} ~ {b}");
        }
    }
}
