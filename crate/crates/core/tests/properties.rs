mod common;

use bearing_core::formation::{bearing_only_field, centroid, scale, TargetFormation};
use bearing_core::graph::{
    augment_anchors, is_laman, laman_exhaustive, laman_pebble_game, random_henneberg, Graph,
};
use bearing_core::localization::{
    is_bearing_localizable, localization_objective, localization_protocol_field, AnchoredNetwork,
};
use bearing_core::rigidity::{
    is_infinitesimally_bearing_rigid, is_infinitesimally_distance_rigid, projection,
    trivial_bearing_motion_basis,
};
use bearing_core::sim::random_configuration_with;
use bearing_core::Network;
use common::{fd_jacobian, laman_network, random_graph, random_network_on, rank, rng};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

fn vector(d: usize) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-5.0..5.0f64, d)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-4)
        .prop_map(DVector::from_vec)
}

/// Brute-force Laman count check over every vertex subset.
fn laman_oracle(g: &Graph) -> bool {
    let n = g.n();
    if g.m() != 2 * n - 3 {
        return false;
    }
    (1u32..(1 << n)).all(|mask| {
        let k = mask.count_ones() as usize;
        if k < 2 {
            return true;
        }
        let inside = g.edges().iter().filter(|&&(i, j)| mask >> i & 1 == 1 && mask >> j & 1 == 1).count();
        inside <= 2 * k - 3
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_symmetric_idempotent_with_unit_spectrum(x in (2usize..5).prop_flat_map(vector)) {
        let p = projection(&x).unwrap();
        let d = x.len();
        prop_assert!((&p - p.transpose()).abs().max() < 1e-12);
        prop_assert!((&p * &p - &p).abs().max() < 1e-12);
        let mut eig: Vec<f64> = p.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        prop_assert!(eig[0].abs() < 1e-12);
        prop_assert!(eig[1..].iter().all(|e| (e - 1.0).abs() < 1e-12));
        prop_assert!((p.trace() - (d - 1) as f64).abs() < 1e-12);
    }

    #[test]
    fn projection_ignores_scale_and_sign(x in vector(3), s in prop_oneof![-4.0..-0.1f64, 0.1..4.0f64]) {
        let a = projection(&x).unwrap();
        let b = projection(&(&x * s)).unwrap();
        prop_assert!((a - b).abs().max() < 1e-12);
    }

    #[test]
    fn bearing_rank_matches_laplacian_rank(seed in any::<u64>(), n in 3usize..9, extra in 0usize..6, d in 2usize..4) {
        let mut r = rng(seed);
        let m = (n - 1 + extra).min(n * (n - 1) / 2);
        let net = random_network_on(random_graph(n, m, &mut r), d, &mut r);
        let rb = net.bearing_rigidity_matrix();
        let l = net.bearing_laplacian();
        prop_assert_eq!(rank(&rb), rank(&l));
        // Same null space: R_B^T R_B has the same kernel as L.
        let gram = rb.transpose() * &rb;
        let stacked = DMatrix::from_fn(2 * gram.nrows(), gram.ncols(), |i, j| {
            if i < gram.nrows() { gram[(i, j)] } else { l[(i - gram.nrows(), j)] }
        });
        prop_assert_eq!(rank(&stacked), rank(&l));
    }

    #[test]
    fn laplacian_is_psd_and_kills_trivial_motions(seed in any::<u64>(), n in 2usize..9, d in 2usize..4) {
        let mut r = rng(seed);
        let m = r.gen_range(n - 1..=n * (n - 1) / 2);
        let net = random_network_on(random_graph(n, m, &mut r), d, &mut r);
        let l = net.bearing_laplacian();
        prop_assert!((&l - l.transpose()).abs().max() < 1e-12);
        let min = l.clone().symmetric_eigenvalues().min();
        prop_assert!(min > -1e-10);
        let basis = trivial_bearing_motion_basis(&net).basis;
        prop_assert!((&l * &basis).abs().max() < 1e-10);
        prop_assert!((net.bearing_rigidity_matrix() * &basis).abs().max() < 1e-10);
    }

    #[test]
    fn rigidity_invariant_under_translation_and_scaling(
        seed in any::<u64>(), n in 3usize..10, d in 2usize..4,
        shift in -10.0..10.0f64, factor in 0.05..20.0f64,
    ) {
        let mut r = rng(seed);
        let net = laman_network(n, d, &mut r);
        let moved = net.with_positions(net.positions().map(|x| x * factor + shift)).unwrap();
        prop_assert_eq!(
            is_infinitesimally_bearing_rigid(&net).rank,
            is_infinitesimally_bearing_rigid(&moved).rank
        );
    }

    #[test]
    fn lifting_preserves_bearing_rank(seed in any::<u64>(), n in 3usize..10) {
        let mut r = rng(seed);
        let m = r.gen_range(n - 1..=n * (n - 1) / 2);
        let net = random_network_on(random_graph(n, m, &mut r), 2, &mut r);
        let flat = is_infinitesimally_bearing_rigid(&net);
        let up = is_infinitesimally_bearing_rigid(&net.lifted(3).unwrap());
        prop_assert_eq!(flat.is_rigid(), up.is_rigid());
    }

    #[test]
    fn planar_bearing_and_distance_rigidity_agree(seed in any::<u64>(), n in 3usize..9) {
        let mut r = rng(seed);
        let m = r.gen_range(n - 1..=n * (n - 1) / 2);
        let net = random_network_on(random_graph(n, m, &mut r), 2, &mut r);
        prop_assert_eq!(
            is_infinitesimally_bearing_rigid(&net).is_rigid(),
            is_infinitesimally_distance_rigid(&net).is_rigid()
        );
    }

    #[test]
    fn witness_is_a_unit_nontrivial_motion(seed in any::<u64>(), n in 4usize..9, d in 2usize..4) {
        let mut r = rng(seed);
        let net = random_network_on(random_graph(n, n - 1, &mut r), d, &mut r);
        let report = is_infinitesimally_bearing_rigid(&net);
        prop_assert!(!report.is_rigid());
        prop_assert_eq!(report.rank + report.nullity, d * n);
        let w = DVector::from_vec(report.witness.unwrap());
        prop_assert!((w.norm() - 1.0).abs() < 1e-10);
        let rb = net.bearing_rigidity_matrix();
        prop_assert!((&rb * &w).norm() <= 1e-8 * report.singular_values[0]);
        let basis = trivial_bearing_motion_basis(&net).basis;
        prop_assert!((basis.transpose() * &w).norm() < 1e-8);
    }

    #[test]
    fn rigidity_matrices_are_jacobians(seed in any::<u64>(), n in 2usize..7, d in 2usize..4) {
        let mut r = rng(seed);
        let m = r.gen_range(n - 1..=n * (n - 1) / 2);
        let net = random_network_on(random_graph(n, m, &mut r), d, &mut r);
        let p = net.positions().clone();
        let fb = fd_jacobian(|q| net.with_positions(q.clone()).unwrap().bearing_function(), &p, 1e-6);
        let rb = net.bearing_rigidity_matrix();
        prop_assert!((&rb - &fb).norm() <= 1e-6 * rb.norm().max(1.0));
        let fd = fd_jacobian(|q| net.with_positions(q.clone()).unwrap().distance_function(), &p, 1e-6);
        let rd = net.distance_rigidity_matrix();
        prop_assert!((&rd - &fd).norm() <= 1e-6 * rd.norm().max(1.0));
    }

    #[test]
    fn henneberg_graphs_are_laman(seed in any::<u64>(), n in 2usize..13) {
        let (g, steps) = random_henneberg(n, &mut rng(seed)).unwrap();
        prop_assert_eq!(steps.len(), n - 2);
        prop_assert_eq!(g.m(), 2 * n - 3);
        prop_assert!(is_laman(&g).unwrap().is_laman);
        prop_assert!(laman_pebble_game(&g).is_laman);
    }

    #[test]
    fn laman_checks_match_brute_force(seed in any::<u64>(), n in 2usize..10, delta in -2i64..3) {
        let mut r = rng(seed);
        let m = ((2 * n) as i64 - 3 + delta).clamp(1, (n * (n - 1) / 2) as i64) as usize;
        let g = random_graph(n, m, &mut r);
        let truth = laman_oracle(&g);
        let exhaustive = laman_exhaustive(&g);
        prop_assert_eq!(exhaustive.is_laman, truth);
        prop_assert_eq!(laman_pebble_game(&g).is_laman, truth);
        if let Some(subset) = exhaustive.violating_subset {
            let k = subset.len();
            let inside = g.edges().iter().filter(|(i, j)| subset.contains(i) && subset.contains(j)).count();
            prop_assert!(inside > 2 * k - 3);
        }
    }

    #[test]
    fn incidence_rows_sum_to_zero(seed in any::<u64>(), n in 2usize..10) {
        let mut r = rng(seed);
        let m = r.gen_range(1..=n * (n - 1) / 2);
        let g = random_graph(n, m, &mut r);
        let h = g.oriented().incidence_matrix();
        prop_assert_eq!(h.shape(), (m, n));
        for row in h.row_iter() {
            prop_assert_eq!(row.sum(), 0.0);
            prop_assert_eq!(row.iter().filter(|&&x| x != 0.0).count(), 2);
        }
        if g.is_connected() {
            prop_assert_eq!(rank(&h), n - 1);
        }
    }

    #[test]
    fn localizability_conditions(seed in any::<u64>(), n in 4usize..9, d in 2usize..4, na in 1usize..4) {
        let mut r = rng(seed);
        let net = laman_network(n, d, &mut r);
        // L_ff squares the conditioning of R_B, so keep away from nearly
        // degenerate configurations where the two rank tests can disagree.
        let sv = is_infinitesimally_bearing_rigid(&net).singular_values;
        prop_assume!(sv[d * n - d - 2] > 1e-3 * sv[0]);
        let anchors: Vec<usize> = (0..na.min(n - 1)).collect();
        let an = AnchoredNetwork::from_network(&net, &anchors).unwrap();
        let rep = is_bearing_localizable(&an);
        if anchors.len() >= 2 && is_infinitesimally_bearing_rigid(&net).is_rigid() {
            prop_assert!(rep.localizable);
        }
        if anchors.len() == 2 {
            let aug = net.with_graph(augment_anchors(net.graph(), &anchors).unwrap()).unwrap();
            prop_assert_eq!(rep.localizable, is_infinitesimally_bearing_rigid(&aug).is_rigid());
        }
        if rep.localizable {
            prop_assert!(rep.anchor_bound_met);
        } else {
            let motion = DVector::from_vec(rep.follower_motion.unwrap());
            prop_assert!((net.bearing_laplacian() * &motion).norm() < 1e-6);
            prop_assert!(anchors.iter().all(|&a| (0..d).all(|c| motion[a * d + c] == 0.0)));
        }
    }

    #[test]
    fn localization_objective_decreases_along_protocol(seed in any::<u64>(), n in 4usize..9, d in 2usize..4) {
        let mut r = rng(seed);
        let net = laman_network(n, d, &mut r);
        let an = AnchoredNetwork::from_network(&net, &[0, 1]).unwrap();
        let est = random_configuration_with(&mut r, n, d, (-1.0, 2.0), None);
        let mut followers = an.follower_part(&est);
        let mut j = localization_objective(&an, &an.assemble(followers.as_slice()));
        for _ in 0..200 {
            followers += localization_protocol_field(&an, &an.assemble(followers.as_slice())) * 0.01;
            let next = localization_objective(&an, &an.assemble(followers.as_slice()));
            prop_assert!(next <= j + 1e-12);
            j = next;
        }
    }

    #[test]
    fn bearing_only_field_preserves_centroid_and_scale_to_first_order(seed in any::<u64>(), n in 3usize..8, d in 2usize..4) {
        let mut r = rng(seed);
        let target = laman_network(n, d, &mut r);
        let tf = TargetFormation::from_configuration(&target, &[]).unwrap();
        let p = random_configuration_with(&mut r, n, d, (-1.0, 2.0), Some(tf.graph()));
        let v = bearing_only_field(&tf, &p).unwrap();
        let c = centroid(&v, d);
        prop_assert!(c.iter().all(|x| x.abs() < 1e-12));
        let centered = DVector::from_fn(n * d, |k, _| p[k] - centroid(&p, d)[k % d]);
        prop_assert!(centered.dot(&v).abs() < 1e-10);
        let h = 1e-7;
        let ds = (scale(&(&p + &v * h), d) - scale(&(&p - &v * h), d)) / (2.0 * h);
        prop_assert!(ds.abs() < 1e-6);
    }
}

#[test]
fn generic_directions_give_rigid_laman_networks() {
    let mut r = rng(5);
    let mut rigid = 0;
    for _ in 0..1000 {
        let d = r.gen_range(2..4);
        let net = laman_network(r.gen_range(3..8), d, &mut r);
        rigid += usize::from(is_infinitesimally_bearing_rigid(&net).is_rigid());
    }
    assert_eq!(rigid, 1000);
}

#[test]
fn pair_network_is_rigid() {
    let net = Network::from_points(Graph::new(2, [(0, 1)]).unwrap(), &[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
    assert!(is_infinitesimally_bearing_rigid(&net).is_rigid());
}
