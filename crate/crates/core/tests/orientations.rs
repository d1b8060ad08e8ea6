//! Orientation invariants checked against direct counting.

use proptest::prelude::*;
use rand::Rng;

use rigidpack::connectivity::is_k_connected;
use rigidpack::constructions::{complete_graph, gnp};
use rigidpack::graph::Graph;
use rigidpack::orientation::{
    balanced_orientation, dr_orientation, hakimi_orientation, k_connected_orientation,
    robbins_orientation, set_in_neighbors, CertificateKind, DegreeSpec, OrientationError, RSet,
};
use rigidpack::rigidity::RigidityOracle;
use rigidpack::SeededStream;

fn minimal_base(g: &Graph, d: usize, seed: u64) -> Graph {
    let o = RigidityOracle::new(g, d, seed, 0).unwrap();
    g.edge_subgraph(&o.extract_base(&g.all_edge_ids())).unwrap()
}

#[test]
fn dr_orientation_on_random_bases() {
    for (n, d) in [(8, 2), (10, 3), (12, 3), (17, 4)] {
        for seed in 0..3 {
            let base = minimal_base(&complete_graph(n), d, seed);
            let r = RSet::first(n, d);
            let dg = dr_orientation(&base, &r).unwrap();
            assert_eq!(dg.in_degrees(), r.spec(n).unwrap().values());
        }
    }
}

#[test]
fn dr_orientation_rejects_non_sparse_input() {
    // right edge count, but a K_5 inside an otherwise sparse graph in the plane
    let mut pairs: Vec<(usize, usize)> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
    pairs.extend([(5, 0), (6, 0), (7, 0)]);
    let g = Graph::new(8, pairs).unwrap();
    assert_eq!(g.m(), 13);
    match dr_orientation(&g, &RSet::first(8, 2)) {
        Err(OrientationError::SparsityViolated(cert)) => {
            assert_eq!(cert.kind, CertificateKind::ViolatingSet);
            assert!(cert.lhs > cert.rhs);
        }
        other => panic!("expected a sparsity certificate, got {other:?}"),
    }
}

#[test]
fn in_neighbor_property_on_several_bases() {
    // k = 2, d = 4: sets meeting R in at most 5 vertices have 2 in-neighbors
    let n = 14;
    let r = RSet::first(n, 4);
    for seed in 0..4 {
        let base = minimal_base(&complete_graph(n), 4, seed);
        let dg = dr_orientation(&base, &r).unwrap();
        for mask in 1u32..(1 << n) - 1 {
            let x: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if r.count_in(&x) <= 5 {
                assert!(set_in_neighbors(&dg, &x).len() >= 2, "X = {x:?}");
            }
        }
    }
}

#[test]
fn pipeline_on_dense_random_graph() {
    let g = gnp(22, 0.95, 4, 0);
    match k_connected_orientation(&g, 2, None, 4, true) {
        Ok(out) => assert_eq!(out.report.verified, Some(true)),
        Err(OrientationError::Packing(_)) => {}
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn pipeline_reports_packing_deficiency() {
    let c = Graph::new(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
    assert!(matches!(
        k_connected_orientation(&c, 2, None, 0, false),
        Err(OrientationError::Packing(_))
    ));
}

#[test]
fn explicit_r_is_honored() {
    let g = complete_graph(17);
    let r = RSet::new(4, (7..17).collect()).unwrap();
    let out = k_connected_orientation(&g, 2, Some(r.clone()), 1, true).unwrap();
    assert_eq!(out.bases[0].in_degrees(), r.spec(17).unwrap().values());
    assert_eq!(out.report.verified, Some(true));
}

fn brute_orientable(g: &Graph, spec: &[usize]) -> bool {
    let m = g.m();
    (0u32..1 << m).any(|mask| {
        let mut indeg = vec![0; g.n()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            indeg[if mask >> e & 1 == 1 { v } else { u }] += 1;
        }
        indeg == spec
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balanced_orientation_bounds(seed in any::<u64>(), n in 1usize..14, p in 0.1f64..1.0) {
        let g = gnp(n, p, seed, 0);
        let dg = balanced_orientation(&g);
        let (ins, outs) = (dg.in_degrees(), dg.out_degrees());
        for v in 0..n {
            prop_assert!(outs[v] >= g.degree(v) / 2);
            prop_assert!(ins[v].abs_diff(outs[v]) <= 1);
        }
    }

    #[test]
    fn hakimi_agrees_with_enumeration(seed in any::<u64>(), n in 2usize..7) {
        let g = gnp(n, 0.5, seed, 1);
        prop_assume!(g.m() <= 12);
        let mut rng = SeededStream::new(seed, 2);
        let mut spec = vec![0; n];
        for _ in 0..g.m() {
            spec[rng.random_range(0..n)] += 1;
        }
        let ds = DegreeSpec::new(spec.clone());
        match hakimi_orientation(&g, &ds) {
            Ok(dg) => prop_assert_eq!(dg.in_degrees(), spec),
            Err(cert) => {
                prop_assert!(!brute_orientable(&g, &spec));
                prop_assert!(cert.holds(&g, &ds));
            }
        }
    }

    #[test]
    fn robbins_on_two_edge_connected_graphs(seed in any::<u64>(), n in 3usize..12) {
        // a Hamiltonian cycle plus random chords is 2-edge-connected
        let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
        let extra = gnp(n, 0.3, seed, 3);
        pairs.extend(extra.edges().iter().copied());
        pairs.sort_unstable();
        pairs.dedup();
        let g = Graph::new(n, pairs).unwrap();
        let dg = robbins_orientation(&g).unwrap();
        prop_assert!(is_k_connected(&dg, 1).connected);
    }
}
