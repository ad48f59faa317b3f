mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use maxwell_trees::dual::{build_system, drop_edges, project_feasible, solve_dual, DualOptions, DualPoint};
use maxwell_trees::geometry::{BoundaryConfig, Network};
use maxwell_trees::oracle::{random_admissible_family, random_topology, steiner_oracle};
use maxwell_trees::primal::{solve_primal, PrimalOptions};
use maxwell_trees::topology::Tree;

fn instance(seed: u64, n_max: usize) -> (Tree, BoundaryConfig, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=n_max);
    let m = rng.gen_range(2..=3);
    let z = BoundaryConfig::from_flat(m, (0..n * m).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    let t = random_topology(n, &mut rng);
    (t, z, rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn primal_beats_random_placements(seed in any::<u64>()) {
        let (t, z, mut rng) = instance(seed, 6);
        let p = solve_primal(&t, &z, &PrimalOptions::default()).unwrap();
        prop_assert!(p.converged);
        for _ in 0..5 {
            let interior: Vec<f64> = (0..t.interior_count() * z.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let other = Network::new(t.clone(), &z, &interior).unwrap();
            prop_assert!(p.length <= other.length() + 1e-12);
        }
    }

    #[test]
    fn primal_is_rigid_motion_invariant(seed in any::<u64>(), shift in -5.0f64..5.0, scale in 0.1f64..10.0) {
        let (t, z, _) = instance(seed, 5);
        let moved = BoundaryConfig::from_flat(z.dim(), z.as_flat().iter().map(|x| scale * x + shift).collect()).unwrap();
        let a = solve_primal(&t, &z, &PrimalOptions::default()).unwrap();
        let b = solve_primal(&t, &moved, &PrimalOptions::default()).unwrap();
        prop_assert!((b.length - scale * a.length).abs() <= 1e-8 * (1.0 + b.length));
    }

    #[test]
    fn weak_duality_for_any_feasible_point(seed in any::<u64>()) {
        let (t, z, mut rng) = instance(seed, 6);
        let p = solve_primal(&t, &z, &PrimalOptions::default()).unwrap();
        let system = build_system(&t, z.dim());
        let start = DualPoint::new(z.dim(), (0..z.len() * z.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect());
        let proj = project_feasible(&start, &system, 1e-12, 100_000);
        prop_assert!(proj.converged);
        prop_assert!(proj.point.value(z.as_flat()) <= p.length + 1e-9);
    }

    #[test]
    fn strong_duality(seed in any::<u64>()) {
        let (t, z, _) = instance(seed, 6);
        let p = solve_primal(&t, &z, &PrimalOptions::default()).unwrap();
        let d = solve_dual(&build_system(&t, z.dim()), &z, &DualOptions::default()).unwrap();
        prop_assert!(p.converged && d.converged);
        prop_assert!(d.feasibility_residual <= 1e-9);
        prop_assert!(d.value <= p.length + 1e-9);
        prop_assert!(p.length - d.value <= 1e-6 * (1.0 + p.length));
    }

    #[test]
    fn dropping_cylinders_matches_reduced_tree(seed in any::<u64>()) {
        let (t, z, mut rng) = instance(seed, 6);
        let fam = random_admissible_family(&t, &mut rng);
        let full = build_system(&t, z.dim());
        let dropped = drop_edges(&full, &t, &fam).unwrap();
        let reduced = t.reduce(&fam);
        let d = solve_dual(&dropped, &z, &DualOptions::default()).unwrap();
        let p = solve_primal(&reduced.tree, &z, &PrimalOptions::default()).unwrap();
        prop_assert!((d.value - p.length).abs() <= 1e-6 * p.length);
        // Fewer constraints can only raise the maximum.
        let d_full = solve_dual(&full, &z, &DualOptions::default()).unwrap();
        prop_assert!(d.value >= d_full.value - 1e-9);
    }

    #[test]
    fn complement_sides_give_the_same_value(seed in any::<u64>()) {
        let (t, z, _) = instance(seed, 5);
        let s = build_system(&t, z.dim());
        let a = solve_dual(&s, &z, &DualOptions::default()).unwrap();
        let b = solve_dual(&s.complemented(), &z, &DualOptions::default()).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-8 * (1.0 + a.value));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn steiner_oracle_is_a_lower_bound(seed in any::<u64>()) {
        let (t, z, _) = instance(seed, 5);
        let best = steiner_oracle(&z, &PrimalOptions::default()).unwrap();
        let single = solve_primal(&t, &z, &PrimalOptions::default()).unwrap();
        prop_assert!(best.length <= single.length + 1e-9);
        prop_assert!(best.lengths.iter().all(|&l| best.length <= l + 1e-9));
    }
}

#[test]
fn gamma_reduction_preserves_length() {
    let z = common::obtuse();
    let p = solve_primal(&common::star3(), &z, &PrimalOptions::default()).unwrap();
    let (reduced, net) = p.network.gamma_reduce(z.default_degeneracy_tol()).unwrap();
    assert_eq!(reduced.tree.vertex_count(), 3);
    assert!((net.length() - p.length).abs() < 1e-7);
    let lm = p.network.local_minimality(0.01, z.default_degeneracy_tol()).unwrap();
    assert!(lm.locally_minimal);
}

#[test]
fn tetrahedron_in_space() {
    // Regular tetrahedron, reference value from the one-parameter symmetric family.
    let z = common::config(3, &[&[1.0, 1.0, 1.0], &[1.0, -1.0, -1.0], &[-1.0, 1.0, -1.0], &[-1.0, -1.0, 1.0]]);
    let t = Tree::new(6, 4, vec![(0, 4), (1, 4), (4, 5), (2, 5), (3, 5)]).unwrap();
    // Steiner points (s, 0, 0) and (-s, 0, 0): four legs to (±1, ±1, ±1) and a bridge.
    let (_, want) = common::golden_min(|s| 4.0 * ((1.0 - s).powi(2) + 2.0).sqrt() + 2.0 * s, 0.0, 1.0);
    let p = solve_primal(&t, &z, &PrimalOptions::default()).unwrap();
    let d = solve_dual(&build_system(&t, 3), &z, &DualOptions::default()).unwrap();
    assert!((p.length - want).abs() < 1e-8, "{} vs {want}", p.length);
    assert!((d.value - want).abs() < 1e-8, "{} vs {want}", d.value);
}
