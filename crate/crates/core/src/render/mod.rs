//! Pictures of box covers: slices along the unstable manifold of a saddle
//! for Hénon maps, direct plane views for polynomials and real Hénon maps.
//!
//! Point evaluation here is plain floating point. Pictures are for looking,
//! not for proofs.

mod image;
mod unstable;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxtree::{Address, BoxTree};
use crate::error::{Error, Result};
use crate::maps::{MapKind, MapModel, Point};

pub use self::image::Image;
pub use unstable::{default_saddle, unstable_parameterization, UnstableParam};

/// Window, resolution and heuristic settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub center: (f64, f64),
    /// Half-width and half-height of the window.
    pub half: (f64, f64),
    pub width: usize,
    pub height: usize,
    pub gamma_depth: usize,
    pub kplus_iters: usize,
    /// Defaults to `2R'`.
    pub escape_radius: Option<f64>,
    /// Lighten pixels that seem to lie in `K+`.
    pub kplus: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            center: (0.0, 0.0),
            half: (1.0, 1.0),
            width: 512,
            height: 512,
            gamma_depth: 20,
            kplus_iters: 100,
            escape_radius: None,
            kplus: true,
        }
    }
}

impl RenderConfig {
    fn validate(&self, map: &MapModel) -> Result<f64> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::usage("resolution must be at least 1x1"));
        }
        if !(self.half.0 > 0.0 && self.half.1 > 0.0) {
            return Err(Error::usage("window half-widths must be positive"));
        }
        let r = self.escape_radius.unwrap_or(2.0 * map.rprime());
        if !(r >= map.rprime()) {
            return Err(Error::usage(format!("escape radius {r} below R' = {}", map.rprime())));
        }
        Ok(r)
    }

    /// Window coordinates of the centre of pixel `(i, j)`; row 0 is the top.
    pub fn pixel_center(&self, i: usize, j: usize) -> (f64, f64) {
        let x = self.center.0 - self.half.0 + (i as f64 + 0.5) * (2.0 * self.half.0 / self.width as f64);
        let y = self.center.1 + self.half.1 - (j as f64 + 0.5) * (2.0 * self.half.1 / self.height as f64);
        (x, y)
    }
}

/// Whether the orbit of `p` stays within `escape_radius` for `iters` steps. Heuristic.
pub fn kplus_heuristic(map: &MapModel, p: &Point, iters: usize, escape_radius: f64) -> bool {
    let mut q = *p;
    for _ in 0..iters {
        q = map.apply(&q);
        if !(map.sup_norm(&q) <= escape_radius) {
            return false;
        }
    }
    true
}

/// A box cover with a component id per live leaf.
pub struct LabeledCover<'a> {
    tree: &'a BoxTree,
    labels: Vec<u32>,
    components: usize,
}

impl<'a> LabeledCover<'a> {
    /// `labels[k]` is the component of the live leaf with address `addresses[k]`.
    pub fn new(tree: &'a BoxTree, addresses: &[Address], labels: &[u32]) -> Result<Self> {
        if addresses.len() != labels.len() {
            return Err(Error::usage("one label per address required"));
        }
        let index: std::collections::HashMap<Address, u32> =
            addresses.iter().copied().zip(labels.iter().copied()).collect();
        let mut per_node = vec![u32::MAX; tree.node_count()];
        for id in tree.live_leaves() {
            if let Some(&l) = index.get(&tree.address(id)) {
                per_node[id as usize] = l;
            }
        }
        let components = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        Ok(LabeledCover { tree, labels: per_node, components })
    }

    pub fn tree(&self) -> &BoxTree {
        self.tree
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// Sorted distinct components of boxes containing `p`.
    pub fn components_at(&self, p: &Point, scratch: &mut Vec<u32>) -> Vec<u32> {
        scratch.clear();
        let map = self.tree.map();
        self.tree.query_intersect_into(&map.point_box(p), scratch);
        let mut out: Vec<u32> = scratch
            .iter()
            .map(|&id| self.labels[id as usize])
            .filter(|&l| l != u32::MAX)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Gray level for a pixel that meets the given components.
///
/// Component ids are in decreasing size order; levels are spread evenly over
/// `[40, 200]`. Several components give black, none gives white.
pub fn palette(hit: &[u32], components: usize) -> u8 {
    match hit {
        [] => 255,
        [id] => {
            if components <= 1 {
                40
            } else {
                let t = f64::from(*id) / (components - 1) as f64;
                (40.0 + 160.0 * t).round() as u8
            }
        }
        _ => 0,
    }
}

fn lighten(g: u8) -> u8 {
    g.saturating_add(40)
}

fn render_with<F>(cover: &LabeledCover<'_>, config: &RenderConfig, escape: f64, point_at: F) -> Image
where
    F: Fn(f64, f64) -> Point + Sync,
{
    let map = cover.tree.map();
    let rows: Vec<Vec<u8>> = (0..config.height)
        .into_par_iter()
        .map_init(Vec::new, |scratch, j| {
            let mut row = Vec::with_capacity(config.width * 3);
            for i in 0..config.width {
                let (x, y) = config.pixel_center(i, j);
                let p = point_at(x, y);
                let hit = cover.components_at(&p, scratch);
                let mut g = palette(&hit, cover.components);
                if config.kplus && kplus_heuristic(map, &p, config.kplus_iters, escape) {
                    g = lighten(g);
                }
                row.extend_from_slice(&[g, g, g]);
            }
            row
        })
        .collect();
    Image::from_rgb(config.width, config.height, rows.concat())
}

/// Slice of the cover along `gamma`, pixels indexed by the parameter plane.
pub fn render_slice(cover: &LabeledCover<'_>, param: &UnstableParam, config: &RenderConfig) -> Result<Image> {
    let escape = config.validate(cover.tree.map())?;
    Ok(render_with(cover, config, escape, |x, y| param.eval(Complex64::new(x, y))))
}

/// Direct view in `C` (polynomials) or `R^2` (real Hénon maps).
pub fn render_plane(cover: &LabeledCover<'_>, config: &RenderConfig) -> Result<Image> {
    let map = cover.tree.map();
    let escape = config.validate(map)?;
    let zero = Complex64::new(0.0, 0.0);
    match map.kind() {
        MapKind::HenonComplex => Err(Error::usage("plane rendering needs a one-dimensional or real map")),
        MapKind::HenonReal => {
            Ok(render_with(cover, config, escape, |x, y| [Complex64::new(x, 0.0), Complex64::new(y, 0.0)]))
        }
        MapKind::QuadPoly | MapKind::CubicPoly => {
            Ok(render_with(cover, config, escape, |x, y| [Complex64::new(x, y), zero]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::MapKind;

    #[test]
    fn palette_rules() {
        assert_eq!(palette(&[], 3), 255);
        assert_eq!(palette(&[0], 3), 40);
        assert_eq!(palette(&[2], 3), 200);
        assert_eq!(palette(&[1], 3), 120);
        assert_eq!(palette(&[0, 1], 3), 0);
        assert_eq!(lighten(240), 255);
    }

    #[test]
    fn kplus_cases() {
        let m = MapModel::new(MapKind::HenonComplex, Some("0.3"), "-1.17", Some(2.01)).unwrap();
        let far = [Complex64::new(10.0, 0.0), Complex64::new(10.0, 0.0)];
        assert!(!kplus_heuristic(&m, &far, 2, 2.0 * m.rprime()));
        let sink = [Complex64::new(-0.6119429464123962, 0.0); 2];
        assert!(kplus_heuristic(&m, &sink, 1000, 2.0 * m.rprime()));
        let m = MapModel::new(MapKind::HenonComplex, Some("0.15"), "-1.1875", Some(1.9)).unwrap();
        assert!(kplus_heuristic(&m, &[Complex64::new(0.0, 0.0); 2], 100, 2.0 * m.rprime()));
    }

    #[test]
    fn empty_cover_is_white() {
        let m = MapModel::new(MapKind::QuadPoly, None, "0", Some(2.0)).unwrap();
        let t = BoxTree::init_root(&m);
        let cover = LabeledCover::new(&t, &[], &[]).unwrap();
        let cfg = RenderConfig { width: 8, height: 8, kplus: false, ..Default::default() };
        let img = render_plane(&cover, &cfg).unwrap();
        assert!(img.rgb().iter().all(|&b| b == 255));
    }

    #[test]
    fn plane_render_rejects_complex_henon() {
        let m = MapModel::new(MapKind::HenonComplex, Some("0.3"), "-1.17", Some(2.01)).unwrap();
        let t = BoxTree::init_root(&m);
        let cover = LabeledCover::new(&t, &[], &[]).unwrap();
        assert!(render_plane(&cover, &RenderConfig::default()).is_err());
    }
}
