mod common;

use boxchain::boxtree::BoxTree;
use boxchain::cli::{Pipeline, RunConfig, SavedModel};
use boxchain::maps::{fixed_points, MapModel, Stability};
use boxchain::render::{
    default_saddle, palette, render_plane, render_slice, unstable_parameterization, LabeledCover, RenderConfig,
};
use num_complex::Complex64;

fn pipeline(map: &MapModel, schedule: &str) -> Pipeline {
    let mut p = Pipeline::new(map, RunConfig::new(schedule.parse().unwrap())).unwrap();
    p.run(|_| {}).unwrap();
    p
}

fn saved(p: &Pipeline, edges: bool) -> SavedModel {
    let bounds = p.record().steps.last().map(|s| &s.bounds);
    SavedModel::from_model(p.tree().map(), p.model().unwrap(), bounds, edges)
}

#[test]
fn model_round_trip_is_byte_identical() {
    for (map, schedule) in [(common::altper2(), "uniform*4"), (common::cubicdouble(), "uniform*5")] {
        let p = pipeline(&map, schedule);
        for edges in [false, true] {
            let m = saved(&p, edges);
            let text = m.to_text();
            let back = SavedModel::parse_text(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.to_text(), text);
            let json = m.to_json();
            assert_eq!(SavedModel::parse_json(&json).unwrap().to_json(), json);
        }
    }
}

#[test]
fn loaded_model_renders_like_in_memory_model() {
    let p = pipeline(&common::quad("-1"), "uniform*6");
    let m = saved(&p, false);
    let cfg = RenderConfig { width: 64, height: 48, half: (2.0, 1.5), ..Default::default() };

    let model = p.model().unwrap();
    let cover = LabeledCover::new(p.tree(), model.gamma.addresses(), &model.components).unwrap();
    let direct = render_plane(&cover, &cfg).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    m.save(&path, false).unwrap();
    let loaded = SavedModel::load(&path).unwrap();
    let map = loaded.map().unwrap();
    let tree = loaded.tree(&map).unwrap();
    let cover2 = LabeledCover::new(&tree, &loaded.addresses(), &loaded.components()).unwrap();
    let again = render_plane(&cover2, &cfg).unwrap();
    assert_eq!(direct, again);
    assert_eq!(render_plane(&cover2, &cfg).unwrap().to_ppm(), again.to_ppm());
}

/// Every unlightened pixel's gray level equals the palette of a linear scan over the boxes.
#[test]
fn pixel_classification_is_sound() {
    for (map, schedule) in [(common::quad("-1"), "uniform*5"), (common::realhorse(), "uniform*5")] {
        let p = pipeline(&map, schedule);
        let model = p.model().unwrap();
        let cover = LabeledCover::new(p.tree(), model.gamma.addresses(), &model.components).unwrap();
        let r = map.rprime();
        let cfg = RenderConfig { width: 40, height: 40, half: (r, r), kplus: false, ..Default::default() };
        let img = render_plane(&cover, &cfg).unwrap();
        let t = p.tree();
        for j in 0..cfg.height {
            for i in 0..cfg.width {
                let (x, y) = cfg.pixel_center(i, j);
                let axes = [x, y];
                let mut hit: Vec<u32> = t
                    .live_leaves()
                    .into_iter()
                    .enumerate()
                    .filter(|(_, id)| t.leaf_box(*id).contains_point(&axes))
                    .map(|(v, _)| model.components[v])
                    .collect();
                hit.sort_unstable();
                hit.dedup();
                let g = palette(&hit, model.component_count());
                assert_eq!(img.pixel(i, j), [g, g, g], "{} pixel ({i},{j})", map.describe());
            }
        }
    }
}

#[test]
fn single_box_palette() {
    let map = common::quad("0");
    let tree = BoxTree::init_root(&map);
    let root = tree.live_leaves()[0];
    let cover = LabeledCover::new(&tree, &[tree.address(root)], &[0]).unwrap();
    let cfg = RenderConfig { width: 8, height: 8, half: (4.0, 4.0), kplus: false, ..Default::default() };
    let img = render_plane(&cover, &cfg).unwrap();
    let r = map.rprime();
    for j in 0..8 {
        for i in 0..8 {
            let (x, y) = cfg.pixel_center(i, j);
            let want = if x.abs() <= r && y.abs() <= r { 40 } else { 255 };
            assert_eq!(img.pixel(i, j)[0], want);
        }
    }
}

#[test]
fn slice_render_is_deterministic() {
    let map = common::per31();
    let p = pipeline(&map, "uniform*4");
    let model = p.model().unwrap();
    let cover = LabeledCover::new(p.tree(), model.gamma.addresses(), &model.components).unwrap();
    let saddle = default_saddle(&map).unwrap();
    let g = unstable_parameterization(&map, &saddle, 20).unwrap();
    let cfg = RenderConfig { width: 48, height: 48, ..Default::default() };
    let a = render_slice(&cover, &g, &cfg).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| render_slice(&cover, &g, &cfg).unwrap());
    assert_eq!(a.to_ppm(), b.to_ppm());
    // the saddle itself is at the window centre and lies in the model
    assert!(a.rgb().iter().any(|&v| v < 255));
}

/// `f(gamma(z)) = gamma(lambda1 z)` on the unit disk.
#[test]
fn unstable_parameterization_functional_equation() {
    let map = common::per31();
    let saddle = fixed_points(&map).into_iter().find(|f| f.classification == Stability::Saddle).unwrap();
    let g = unstable_parameterization(&map, &saddle, 20).unwrap();
    let l = g.lambda1();
    let mut worst = 0.0_f64;
    for i in -20..=20 {
        for j in -20..=20 {
            let z = Complex64::new(i as f64 / 20.0, j as f64 / 20.0);
            if z.norm() > 1.0 {
                continue;
            }
            let lhs = map.apply(&g.eval(z));
            let rhs = g.eval(l * z);
            worst = worst.max((lhs[0] - rhs[0]).norm()).max((lhs[1] - rhs[1]).norm());
        }
    }
    assert!(worst < 1e-6, "residual {worst}");
}
