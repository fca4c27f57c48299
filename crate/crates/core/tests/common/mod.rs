#![allow(dead_code)]

use std::collections::BTreeSet;

use boxchain::boxtree::{Address, BoxTree};
use boxchain::chain_graph::{edge_predicate, ChainGraph};
use boxchain::ia::{iv_arith, Interval, IvOp};
use boxchain::maps::{MapKind, MapModel};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;

pub fn henon(a: &str, c: &str, rprime: f64) -> MapModel {
    MapModel::new(MapKind::HenonComplex, Some(a), c, Some(rprime)).unwrap()
}

pub fn per31() -> MapModel {
    henon("0.3", "-1.17", 2.01)
}

pub fn altper2() -> MapModel {
    henon("0.15", "-1.1875", 1.9)
}

pub fn complexhorse() -> MapModel {
    henon("-0.74", "-2.75", 2.84)
}

pub fn realhorse() -> MapModel {
    MapModel::new(MapKind::HenonReal, Some("-0.25"), "-3", Some(2.57)).unwrap()
}

pub fn quad(c: &str) -> MapModel {
    MapModel::new(MapKind::QuadPoly, None, c, None).unwrap()
}

pub fn cubicdouble() -> MapModel {
    MapModel::new(MapKind::CubicPoly, Some("0,0.1"), "-0.19,1.1", Some(2.1)).unwrap()
}

// ---------------------------------------------------------------- intervals

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// A float with a random magnitude, sometimes tiny, huge or an exact small integer.
pub fn random_float<R: Rng>(rng: &mut R) -> f64 {
    let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    match rng.gen_range(0..6) {
        0 => sign * rng.gen_range(0..16) as f64,
        1 => sign * rng.gen::<f64>() * 2f64.powi(rng.gen_range(-300..-250)),
        2 => sign * rng.gen::<f64>() * 2f64.powi(rng.gen_range(200..300)),
        3 => sign * rng.gen::<f64>() * 2f64.powi(rng.gen_range(-60..60)),
        _ => sign * rng.gen::<f64>() * 4.0,
    }
}

pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    let x = random_float(rng);
    if rng.gen_bool(0.2) {
        return Interval::point(x);
    }
    let y = if rng.gen_bool(0.5) { random_float(rng) } else { x + rng.gen::<f64>() * x.abs().max(1e-3) };
    Interval::new(x.min(y), x.max(y)).unwrap()
}

/// Endpoint or random interior member.
fn sample<R: Rng>(rng: &mut R, iv: Interval) -> f64 {
    match rng.gen_range(0..3) {
        0 => iv.lo(),
        1 => iv.hi(),
        _ => {
            let t: f64 = rng.gen();
            (iv.lo() + t * (iv.hi() - iv.lo())).clamp(iv.lo(), iv.hi())
        }
    }
}

fn encloses_exact(iv: Interval, v: &BigRational) -> bool {
    let lo_ok = iv.lo() == f64::NEG_INFINITY || (iv.lo().is_finite() && rat(iv.lo()) <= *v);
    let hi_ok = iv.hi() == f64::INFINITY || (iv.hi().is_finite() && *v <= rat(iv.hi()));
    lo_ok && hi_ok
}

/// One random interval operation checked against exact rational arithmetic.
/// Returns `false` on an inclusion violation.
pub fn interval_trial<R: Rng>(rng: &mut R) -> bool {
    let a = random_interval(rng);
    let b = random_interval(rng);
    let op = [IvOp::Add, IvOp::Sub, IvOp::Mul, IvOp::Square, IvOp::Div][rng.gen_range(0..5)];
    let Ok(r) = iv_arith(op, a, b) else {
        return op == IvOp::Div && b.contains_zero();
    };
    for _ in 0..4 {
        let (x, y) = (sample(rng, a), sample(rng, b));
        let (qx, qy) = (rat(x), rat(y));
        let exact = match op {
            IvOp::Add => qx + qy,
            IvOp::Sub => qx - qy,
            IvOp::Mul => qx * qy,
            IvOp::Square => &qx * &qx,
            IvOp::Div => qx / qy,
        };
        if !encloses_exact(r, &exact) {
            return false;
        }
    }
    // sqrt: lo^2 <= x <= hi^2
    if a.hi() >= 0.0 {
        let s = a.sqrt().unwrap();
        let x = sample(rng, a).max(0.0);
        let qx = rat(x);
        let lo = rat(s.lo());
        if s.hi().is_finite() {
            let hi = rat(s.hi());
            if !(&lo * &lo <= qx && qx <= &hi * &hi) {
                return false;
            }
        } else if !(&lo * &lo <= qx) {
            return false;
        }
    }
    true
}

/// Decimal string oracle: `n / 10^k` as a rational.
pub fn decimal_rational(mantissa: i64, exp10: u32) -> BigRational {
    BigRational::new(BigInt::from(mantissa), BigInt::from(10).pow(exp10))
}

pub fn interval_contains_rational(iv: Interval, v: &BigRational) -> bool {
    encloses_exact(iv, v)
}

// -------------------------------------------------------------------- graphs

pub fn random_digraph<R: Rng>(rng: &mut R, max_n: usize) -> (usize, Vec<(u32, u32)>) {
    let n = rng.gen_range(1..=max_n);
    let p: f64 = rng.gen_range(0.0..0.12);
    let mut edges = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if rng.gen_bool(p) {
                edges.push((s as u32, t as u32));
            }
        }
    }
    (n, edges)
}

/// Recurrent-vertex partition by transitive closure: each set holds the vertices
/// mutually reachable by nonempty paths.
pub fn scc_partition_oracle(n: usize, edges: &[(u32, u32)]) -> BTreeSet<BTreeSet<u32>> {
    let mut reach = vec![vec![false; n]; n];
    for &(s, t) in edges {
        reach[s as usize][t as usize] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for v in 0..n {
        if reach[v][v] {
            let class: BTreeSet<u32> = (0..n).filter(|&w| reach[v][w] && reach[w][v]).map(|w| w as u32).collect();
            out.insert(class);
        }
    }
    out
}

pub fn partition_of(labels: &[Option<u32>]) -> BTreeSet<BTreeSet<u32>> {
    let mut groups = std::collections::BTreeMap::<u32, BTreeSet<u32>>::new();
    for (v, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            groups.entry(*l).or_default().insert(v as u32);
        }
    }
    groups.into_values().collect()
}

/// Edge set by brute force over all vertex pairs, indexed like `graph.leaves()`.
pub fn all_pairs_edges(tree: &BoxTree, graph: &ChainGraph) -> BTreeSet<(u32, u32)> {
    let boxes: Vec<_> = graph.leaves().iter().map(|&id| tree.leaf_box(id)).collect();
    let mut out = BTreeSet::new();
    for (k, bk) in boxes.iter().enumerate() {
        let img = tree.map().image(bk);
        for (j, bj) in boxes.iter().enumerate() {
            if edge_predicate(&img, bj, graph.delta) {
                out.insert((k as u32, j as u32));
            }
        }
    }
    out
}

/// Uniform subdivision to `depth` with escape pruning after each level.
pub fn pruned_grid(map: &MapModel, depth: usize) -> BoxTree {
    let mut t = BoxTree::init_root(map);
    for _ in 0..depth {
        t.subdivide_uniform().unwrap();
        t.prune_escaping(6).unwrap();
        t.compact();
    }
    t
}

/// Whether every address in `fine` lies in some box of `coarse`.
pub fn nested(coarse: &BTreeSet<Address>, fine: &[Address]) -> bool {
    fine.iter().all(|a| (0..=a.depth).any(|d| coarse.contains(&a.ancestor(d))))
}

// ------------------------------------------------------------------- sinks

/// The Hénon map with a sink at `(z, z)` whose eigenvalues are `l1`, `l2`:
/// `a = l1 l2`, `z = (l1 + l2) / 2`, `c = z - z^2 + a z`.
pub fn henon_with_sink(l1: Complex64, l2: Complex64) -> (Complex64, Complex64, Complex64) {
    let a = l1 * l2;
    let z = (l1 + l2) / 2.0;
    let c = z - z * z + a * z;
    (a, c, z)
}

/// `|A^{-1} u|` with `A = [[l1, l2], [1, 1]]`.
pub fn sigma_norm(l1: Complex64, l2: Complex64, u: [Complex64; 2]) -> f64 {
    let det = l1 - l2;
    let v0 = (u[0] - l2 * u[1]) / det;
    let v1 = (-u[0] + l1 * u[1]) / det;
    (v0.norm_sqr() + v1.norm_sqr()).sqrt()
}

pub fn euclid(u: [Complex64; 2]) -> f64 {
    (u[0].norm_sqr() + u[1].norm_sqr()).sqrt()
}
