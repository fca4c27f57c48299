mod common;

use std::collections::BTreeSet;

use boxchain::boxtree::BoxTree;
use boxchain::chain_graph::{build_edges, scc_decompose, ChainGraph};
use boxchain::ia::{BoxRegion, Interval};
use boxchain::maps::{fixed_points, MapModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn scc_matches_transitive_closure_on_random_digraphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for trial in 0..200 {
        let (n, edges) = common::random_digraph(&mut rng, 60);
        let g = ChainGraph::from_edges(n, &edges).unwrap();
        let lab = scc_decompose(&g);
        assert_eq!(common::partition_of(lab.labels()), common::scc_partition_oracle(n, &edges), "trial {trial}");
        // sizes are nonincreasing
        assert!(lab.sizes().windows(2).all(|w| w[0] >= w[1]));
    }
}

fn check_edges(map: &MapModel, depth: usize) {
    let tree = common::pruned_grid(map, depth);
    let delta = tree.epsilon_min() / 1000.0;
    let g = build_edges(&tree, delta).unwrap();
    let built: BTreeSet<(u32, u32)> = g.edges().collect();
    assert_eq!(built, common::all_pairs_edges(&tree, &g), "{}", map.describe());
    assert!(!built.is_empty());
}

#[test]
fn build_edges_matches_all_pairs_depth4() {
    check_edges(&common::per31(), 4);
    check_edges(&common::realhorse(), 4);
    check_edges(&common::quad("-1"), 4);
    check_edges(&common::cubicdouble(), 4);
}

fn random_probe(rng: &mut ChaCha8Rng, map: &MapModel) -> BoxRegion {
    let r = map.rprime();
    let axes: Vec<Interval> = (0..map.layout().naxes())
        .map(|_| {
            let c = rng.gen_range(-1.2 * r..1.2 * r);
            let w = rng.gen_range(0.0..0.3 * r);
            Interval::new(c - w, c + w).unwrap()
        })
        .collect();
    BoxRegion::new(map.layout(), &axes).unwrap()
}

#[test]
fn query_intersect_matches_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for map in [common::altper2(), common::realhorse(), common::quad("-0.75")] {
        let mut tree = common::pruned_grid(&map, 4);
        // a few selective levels so leaves sit at mixed depths
        let live = tree.live_leaves();
        let pick: BTreeSet<_> = live.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
        tree.subdivide(|id, _| pick.contains(&id)).unwrap();
        for _ in 0..300 {
            let probe = random_probe(&mut rng, &map);
            let mut got = tree.query_intersect(&probe);
            got.sort_unstable();
            let want: Vec<_> = tree.live_leaves().into_iter().filter(|&id| tree.leaf_box(id).intersects(&probe)).collect();
            assert_eq!(got, want);
        }
    }
}

/// Points on orbit segments that stay in V0 must never be pruned.
#[test]
fn pruning_keeps_bounded_orbits() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for map in [common::altper2(), common::complexhorse(), common::realhorse()] {
        let r = map.rprime();
        let mut witnesses = Vec::new();
        let fixed: Vec<_> = fixed_points(&map).into_iter().map(|f| map.point_axes(&f.location)).collect();
        for k in 0..100_000 {
            if witnesses.len() == 200 {
                break;
            }
            // alternate uniform seeds with seeds near fixed points, where bounded orbits are common
            let axes: Vec<f64> = match fixed.get(k % (fixed.len() + 1)) {
                Some(f) => f.iter().map(|x| x + rng.gen_range(-1e-7..1e-7)).collect(),
                None => (0..map.layout().naxes()).map(|_| rng.gen_range(-r..r)).collect(),
            };
            let mut orbit = vec![map.axes_point(&axes)];
            for _ in 0..13 {
                let next = map.apply(orbit.last().unwrap());
                orbit.push(next);
            }
            if orbit.iter().all(|p| map.sup_norm(p) <= r) {
                // middle point: six bounded iterates each way
                witnesses.push(orbit[6]);
            }
        }
        assert_eq!(witnesses.len(), 200, "{}", map.describe());
        let mut tree = BoxTree::init_root(&map);
        for _ in 0..4 {
            tree.subdivide_uniform().unwrap();
            tree.prune_escaping(6).unwrap();
            tree.compact();
            for w in &witnesses {
                assert!(!tree.query_intersect(&map.point_box(w)).is_empty(), "{} pruned {w:?}", map.describe());
            }
        }
    }
}
