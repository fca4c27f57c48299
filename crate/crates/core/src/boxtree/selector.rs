use num_complex::Complex64;

use super::BoxTree;
use crate::ia::BoxRegion;
use crate::maps::{matmul, MapModel};

/// Refinement heuristic for boxes that appear to lie in a sink basin.
///
/// Not rigorous. It follows the point orbit of the box centre for a few steps
/// and selects the box when the orbit stays within `R'` and the derivative of
/// the iterate along it contracts: the largest singular value of
/// `Df^k(centre)` must be below `threshold`. Bounding the product of the
/// per-step norms instead would never select anything for a Hénon map, since
/// every Hénon Jacobian has a singular value of at least 1.
///
/// Only ever used to decide where to subdivide.
#[derive(Clone, Debug)]
pub struct SinkBasinSelector {
    map: MapModel,
    iterates: usize,
    threshold: f64,
}

pub const DEFAULT_SINK_ITERATES: usize = 20;
pub const DEFAULT_SINK_THRESHOLD: f64 = 1.0;

/// Builds the selector for `tree`'s map.
pub fn sink_basin_selector(tree: &BoxTree, iterates: usize, threshold: f64) -> SinkBasinSelector {
    assert!(iterates >= 1, "iterates must be positive");
    assert!(threshold > 0.0 && threshold <= 1.0, "threshold must lie in (0, 1]");
    SinkBasinSelector { map: tree.map().clone(), iterates, threshold }
}

impl SinkBasinSelector {
    /// Largest singular value of `Df^k` at the centre of `b`, or `None` if the
    /// centre orbit leaves the `R'` ball.
    pub fn contraction(&self, b: &BoxRegion) -> Option<f64> {
        let map = &self.map;
        let rp = map.rprime();
        let mut p = map.axes_point(&b.center());
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut m = [[one, zero], [zero, one]];
        for _ in 0..self.iterates {
            m = matmul(&map.jacobian(&p), &m);
            p = map.apply(&p);
            if !(map.sup_norm(&p) <= rp) {
                return None;
            }
        }
        Some(largest_singular_value(&m))
    }

    pub fn select(&self, b: &BoxRegion) -> bool {
        self.contraction(b).is_some_and(|s| s < self.threshold)
    }
}

/// `sigma_max` of a complex 2x2 matrix.
pub fn largest_singular_value(m: &[[Complex64; 2]; 2]) -> f64 {
    let frob = m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    let disc = (frob * frob - 4.0 * det * det).max(0.0);
    ((frob + disc.sqrt()) / 2.0).sqrt()
}
