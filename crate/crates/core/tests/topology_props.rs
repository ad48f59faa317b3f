mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use maxwell_trees::oracle::{enumerate_topologies, random_admissible_family, random_topology, split_key};
use maxwell_trees::topology::{AdmissibleFamily, EdgeId, TopologyError, Tree, Violation};

fn tree_from_seed(n: usize, seed: u64) -> Tree {
    random_topology(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #[test]
    fn partitions_split_the_boundary(n in 2usize..9, seed in any::<u64>()) {
        let t = tree_from_seed(n, seed);
        for e in t.edge_ids() {
            let p = t.edge_partition(e).unwrap();
            let mut all: Vec<usize> = p.side_one.iter().chain(&p.side_two).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            prop_assert!(!p.side_one.is_empty() && !p.side_two.is_empty());
            // Canonical side: the smaller one, the one without vertex 0 on a tie.
            prop_assert!(p.side_one.len() <= p.side_two.len());
            if p.side_one.len() == p.side_two.len() {
                prop_assert!(!p.side_one.contains(&0));
            }
            let (a, _) = t.edges()[e.0];
            let expected = common::side(&t, a, e.0);
            let (near, _) = t.edge_sides(e).unwrap();
            prop_assert_eq!(near, expected);
        }
    }

    #[test]
    fn reduction_keeps_boundary_and_validity(n in 3usize..9, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_topology(n, &mut rng);
        let fam = random_admissible_family(&t, &mut rng);
        let r = t.reduce(&fam);
        prop_assert!(r.tree.validate().is_valid());
        prop_assert_eq!(r.tree.boundary_count(), n);
        for k in 0..n {
            prop_assert_eq!(r.vertex_map[k], k);
        }
        prop_assert_eq!(r.tree.edge_count(), t.edge_count() - fam.edges.len());
        for (i, m) in r.edge_map.iter().enumerate() {
            prop_assert_eq!(m.is_none(), fam.edges.contains(&EdgeId(i)));
        }
    }

    #[test]
    fn extra_edge_closes_a_cycle(n in 3usize..8, seed in any::<u64>(), pick in any::<(usize, usize)>()) {
        let t = tree_from_seed(n, seed);
        let v = t.vertex_count();
        let (a, b) = (pick.0 % v, pick.1 % v);
        prop_assume!(a != b);
        let mut edges = t.edges().to_vec();
        edges.push((a, b));
        let report = Tree::from_edges(v, n, edges).unwrap().validate();
        let has_cycle = report.violations.iter().any(|x| matches!(x, Violation::Cycle { .. }));
        prop_assert!(has_cycle);
    }
}

#[test]
fn documented_partitions() {
    let star = common::star3();
    let sides: Vec<Vec<usize>> = star.edge_ids().map(|e| star.edge_partition(e).unwrap().side_one).collect();
    assert_eq!(sides, vec![vec![0], vec![1], vec![2]]);

    let binary = Tree::new(6, 4, vec![(0, 4), (1, 4), (4, 5), (2, 5), (3, 5)]).unwrap();
    let sides: Vec<Vec<usize>> = binary.edge_ids().map(|e| binary.edge_partition(e).unwrap().side_one).collect();
    assert_eq!(sides, vec![vec![0], vec![1], vec![2, 3], vec![2], vec![3]]);
}

#[test]
fn interior_leaf_is_rejected() {
    let err = Tree::new(4, 2, vec![(0, 2), (2, 1), (2, 3)]).unwrap_err();
    match err {
        TopologyError::Invalid(r) => {
            assert!(r.violations.contains(&Violation::LowDegreeInterior { vertex: 3, degree: 1 }));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn admissibility_examples() {
    let t = Tree::new(6, 4, vec![(0, 4), (1, 4), (4, 5), (2, 5), (3, 5)]).unwrap();
    assert!(AdmissibleFamily::new(&t, &[EdgeId(2)]).is_ok());
    assert!(AdmissibleFamily::new(&t, &[EdgeId(0), EdgeId(2), EdgeId(3)]).is_err());
    let star = t.reduce(&AdmissibleFamily::new(&t, &[EdgeId(2)]).unwrap()).tree;
    assert_eq!(star.vertex_count(), 5);
    assert!((0..4).all(|k| star.degree(k) == 1));
    assert_eq!(star.degree(4), 4);
}

#[test]
fn catalogues_are_distinct_and_complete() {
    for n in 3..=6 {
        let c = enumerate_topologies(n).unwrap();
        let mut keys: Vec<_> = c.trees.iter().map(split_key).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), c.len());
        assert!(c.trees.iter().all(|t| t.validate().is_valid()));
    }
}
