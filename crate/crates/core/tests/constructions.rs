use rigidpack::connectivity::is_k_connected;
use rigidpack::constructions::{
    complete_graph, harary_host, lovasz_yemini, lovasz_yemini_with_host, min_a, tdrigid_packing,
    tree_rigid_decomposition, Claim, ConstructionError, PackingWitness,
};
use rigidpack::matroid::{is_spanning_tree, partition, GraphicOracle};
use rigidpack::rigidity::{complete_rank, exact_oracle_d2, RigidityOracle};

fn check_witness(w: &PackingWitness, seed: u64) {
    assert!(w.is_disjoint());
    for (i, part) in w.parts.iter().enumerate() {
        let sub = w.part_graph(i);
        match part.claim {
            Claim::Rigid { d } => {
                let o = RigidityOracle::new(&sub, d, seed, i as u64).unwrap();
                assert!(o.is_d_rigid(), "{} is not {d}-rigid", part.label);
                assert!(part.edges.len() >= complete_rank(w.host.n(), d));
            }
            Claim::SpanningTree => assert!(is_spanning_tree(&w.host, &part.edges)),
        }
    }
}

#[test]
fn tdrigid_examples() {
    for (n, d, t) in [(8, 2, 2), (4, 1, 2), (10, 2, 2), (12, 3, 2), (18, 3, 3), (13, 2, 3)] {
        check_witness(&tdrigid_packing(n, d, t).unwrap(), 1);
    }
}

#[test]
fn tree_rigid_examples() {
    for (n, d) in [(11, 6), (4, 1), (6, 2), (9, 3), (14, 3), (20, 5)] {
        check_witness(&tree_rigid_decomposition(n, d).unwrap(), 2);
    }
}

#[test]
fn tree_rigid_planar_complement_by_pebble_game() {
    let w = tree_rigid_decomposition(6, 2).unwrap();
    assert_eq!(w.parts[0].edges.len(), 5);
    let g0 = &w.parts[1].edges;
    assert_eq!(g0.len(), 10);
    // a planar base inside the complement: greedy pebble-game extraction
    let mut base = Vec::new();
    for &e in g0 {
        base.push(e);
        if !exact_oracle_d2(&w.host, &base) {
            base.pop();
        }
    }
    assert_eq!(base.len(), 2 * 6 - 3);
}

#[test]
fn a_formula_matches_search() {
    let mut a = 1usize;
    for d in 1..=1_000_000usize {
        while (a + 1) * a / 2 < d {
            a += 1;
        }
        let closed = ((2.0 * d as f64 + 0.25).sqrt() - 0.5).ceil() as usize;
        assert_eq!(closed, a, "d = {d}");
        assert!((a + 1) * a / 2 >= d && a * (a - 1) / 2 < d);
    }
    assert_eq!(min_a(1_000_000), a);
}

#[test]
fn harary_hosts_are_regular_and_connected() {
    for (k, m) in [(2, 6), (3, 6), (5, 12), (4, 9), (3, 4), (6, 7)] {
        let h = harary_host(k, m).unwrap();
        assert!((0..m).all(|v| h.degree(v) == k), "K={k} m={m}");
        assert!(is_k_connected(&h, k).connected, "K={k} m={m}");
    }
    assert!(matches!(harary_host(2, 2), Err(ConstructionError::TooFewVertices { .. })));
}

#[test]
fn tight_example_with_two_trees() {
    let ex = lovasz_yemini(&[1, 1], 3).unwrap();
    assert_eq!(ex.k, 3);
    assert_eq!(ex.graph.n(), 18);
    assert!(is_k_connected(&ex.graph, 3).connected);
    let f = GraphicOracle::new(&ex.graph);
    let r = partition(&[&f, &f], &ex.graph.all_edge_ids()).unwrap().total;
    assert!(r < 2 * 17);
    assert!(r <= ex.bound.bound);
    assert_eq!(ex.union_rank(0).unwrap(), r);
}

#[test]
fn tight_example_in_the_plane() {
    let ex = lovasz_yemini(&[2], 4).unwrap();
    assert!(is_k_connected(&ex.graph, 5).connected);
    let r = ex.union_rank(3).unwrap();
    assert!(r <= ex.bound.bound && r < 77);
    // s = 3 is below the threshold of the count
    let ex3 = lovasz_yemini(&[2], 3).unwrap();
    assert!(!ex3.bound.strict);
}

#[test]
fn custom_host_must_be_regular() {
    let k6 = complete_graph(6);
    assert!(lovasz_yemini_with_host(&[2], &k6).is_ok());
    assert_eq!(
        lovasz_yemini_with_host(&[1, 1], &k6),
        Err(ConstructionError::NotRegular { k: 3 })
    );
}
