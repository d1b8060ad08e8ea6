use proptest::prelude::*;
use rand::Rng;

use rigidpack::connectivity::{
    brute_force_connectivity, brute_force_separator, is_k_connected, separates,
    vertex_connectivity_pair,
};
use rigidpack::constructions::{complete_graph, gnp};
use rigidpack::graph::{ArcSet, Graph};
use rigidpack::SeededStream;

fn random_arcs(n: usize, p: f64, seed: u64) -> ArcSet {
    let mut rng = SeededStream::new(seed, 0);
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    ArcSet::new(n, arcs).unwrap()
}

/// Number of internally disjoint paths by brute force: the smallest vertex
/// set separating the pair.
fn brute_pair(a: &ArcSet, u: usize, v: usize) -> usize {
    let n = a.n();
    let others: Vec<usize> = (0..n).filter(|&w| w != u && w != v).collect();
    (0u32..1 << others.len())
        .filter_map(|mask| {
            let s: Vec<usize> = (0..others.len()).filter(|&i| mask >> i & 1 == 1).map(|i| others[i]).collect();
            separates(a, &s, u, v).then_some(s.len())
        })
        .min()
        .unwrap()
}

#[test]
fn menger_duality_against_enumeration() {
    for seed in 0..60 {
        let a = random_arcs(7, 0.45, seed);
        for u in 0..7 {
            for v in 0..7 {
                if u == v || a.has_arc(u, v) {
                    continue;
                }
                let pc = vertex_connectivity_pair(&a, u, v).unwrap();
                assert_eq!(pc.value, pc.separator.len());
                assert!(separates(&a, &pc.separator, u, v));
                assert_eq!(pc.value, brute_pair(&a, u, v), "seed {seed} pair ({u}, {v})");
            }
        }
    }
}

#[test]
fn graph_and_symmetric_digraph_agree() {
    for seed in 0..80 {
        let g = gnp(9, 0.55, seed, 1);
        let sym = ArcSet::symmetric(&g);
        for k in 1..=4 {
            assert_eq!(is_k_connected(&g, k).connected, is_k_connected(&sym, k).connected);
        }
    }
}

#[test]
fn complete_digraph_convention() {
    for k in 1..5 {
        let sym = ArcSet::symmetric(&complete_graph(k + 1));
        assert!(is_k_connected(&sym, k).connected);
        assert!(!is_k_connected(&sym, k + 1).connected);
    }
}

#[test]
fn directed_cycle_is_one_connected_only() {
    let c = ArcSet::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
    assert!(is_k_connected(&c, 1).connected);
    let v = is_k_connected(&c, 2);
    let cert = v.certificate.unwrap();
    assert_eq!(cert.separator.len(), 1);
    assert!(separates(&c, &cert.separator, cert.pair.0, cert.pair.1));
    assert!(!brute_force_connectivity(&c, 2).unwrap());
}

#[test]
fn brute_force_separator_is_minimal() {
    let g = Graph::new(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
    assert_eq!(brute_force_separator(&g, 3).unwrap(), Some(vec![2]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn flow_decision_matches_definition(seed in any::<u64>(), n in 2usize..9, k in 1usize..5, p in 0.3f64..1.0, directed: bool) {
        let a = if directed { random_arcs(n, p, seed) } else { ArcSet::symmetric(&gnp(n, p, seed, 2)) };
        let v = is_k_connected(&a, k);
        prop_assert_eq!(v.connected, brute_force_connectivity(&a, k).unwrap());
        if let Some(c) = v.certificate {
            prop_assert!(c.separator.len() < k);
            prop_assert!(separates(&a, &c.separator, c.pair.0, c.pair.1));
        }
    }
}
