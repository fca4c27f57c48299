use num_complex::Complex64;

use super::{MapKind, MapModel, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Sink,
    Saddle,
    Repelling,
    Neutral,
}

/// Moduli within this distance of 1 are treated as neutral.
const NEUTRAL_TOL: f64 = 1e-12;

/// Classifies from multiplier moduli.
pub fn classify(eigenvalues: &[Complex64]) -> Stability {
    let near_one = eigenvalues.iter().any(|l| (l.norm() - 1.0).abs() < NEUTRAL_TOL);
    if near_one {
        return Stability::Neutral;
    }
    let inside = eigenvalues.iter().filter(|l| l.norm() < 1.0).count();
    match (inside, eigenvalues.len() - inside) {
        (_, 0) => Stability::Sink,
        (0, _) => Stability::Repelling,
        _ => Stability::Saddle,
    }
}

/// A fixed point with its linearization.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointInfo {
    /// `(z, z)` for Hénon maps, `(z, 0)` for polynomials.
    pub location: Point,
    /// Eigenvalues of the Jacobian, largest modulus first (one entry for polynomials).
    pub eigenvalues: Vec<Complex64>,
    pub classification: Stability,
    /// Set when the fixed point is a double root.
    pub degenerate: bool,
}

impl FixedPointInfo {
    /// Largest eigenvalue modulus.
    pub fn lambda(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalues of a 2x2 complex matrix, largest modulus first.
pub fn eigenvalues2(m: &[[Complex64; 2]; 2]) -> [Complex64; 2] {
    let half_tr = (m[0][0] + m[1][1]) * 0.5;
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let s = (half_tr * half_tr - det).sqrt();
    let (l1, l2) = (half_tr + s, half_tr - s);
    if l1.norm() >= l2.norm() {
        [l1, l2]
    } else {
        [l2, l1]
    }
}

fn sort_by_modulus(v: &mut [Complex64]) {
    v.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
}

/// All fixed points with eigenvalues and classification.
///
/// Real Hénon maps only report fixed points lying in R^2.
pub fn fixed_points(map: &MapModel) -> Vec<FixedPointInfo> {
    let c = map.c().value();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    match map.kind() {
        MapKind::HenonComplex | MapKind::HenonReal => {
            let a = map.a().expect("Hénon map has a").value();
            // z^2 - (1+a) z + c = 0
            let (roots, degenerate) = quadratic_roots(one, -(one + a), c);
            roots
                .into_iter()
                .filter(|z| map.kind() == MapKind::HenonComplex || z.im == 0.0)
                .map(|z| {
                    let s = (z * z - a).sqrt();
                    let mut ev = vec![z + s, z - s];
                    sort_by_modulus(&mut ev);
                    FixedPointInfo { location: [z, z], classification: classify(&ev), eigenvalues: ev, degenerate }
                })
                .collect()
        }
        MapKind::QuadPoly => {
            let (roots, degenerate) = quadratic_roots(one, -one, c);
            roots
                .into_iter()
                .map(|z| {
                    let ev = vec![2.0 * z];
                    FixedPointInfo { location: [z, zero], classification: classify(&ev), eigenvalues: ev, degenerate }
                })
                .collect()
        }
        MapKind::CubicPoly => {
            let a = map.a().expect("cubic has a").value();
            // z^3 - (3a^2 + 1) z + c = 0
            let p1 = -(3.0 * a * a + one);
            let roots = cubic_roots(p1, c);
            let tol = 1e-9;
            roots
                .iter()
                .map(|&z| {
                    let degenerate = roots.iter().filter(|&&w| (w - z).norm() < tol).count() > 1;
                    let ev = vec![3.0 * z * z - 3.0 * a * a];
                    FixedPointInfo { location: [z, zero], classification: classify(&ev), eigenvalues: ev, degenerate }
                })
                .collect()
        }
    }
}

/// Roots of `A z^2 + B z + C`, plus a flag for a (numerically) double root.
fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> (Vec<Complex64>, bool) {
    let disc = b * b - 4.0 * a * c;
    let s = disc.sqrt();
    // Pick the sign that avoids cancellation.
    let q = if (b.conj() * s).re >= 0.0 { -(b + s) * 0.5 } else { -(b - s) * 0.5 };
    let degenerate = disc.norm() <= 1e-14 * (b.norm_sqr() + (4.0 * a * c).norm()).max(1e-300);
    if q.norm() == 0.0 {
        return (vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)], true);
    }
    let mut r = vec![q / a, c / q];
    if degenerate {
        let m = -b / (2.0 * a);
        r = vec![m, m];
    }
    // Deterministic order: by real part, then imaginary part.
    r.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    (r, degenerate)
}

/// Roots of the depressed cubic `z^3 + p z + q` via Durand-Kerner plus Newton polishing.
fn cubic_roots(p: Complex64, q: Complex64) -> Vec<Complex64> {
    let f = |z: Complex64| z * z * z + p * z + q;
    let df = |z: Complex64| 3.0 * z * z + p;
    let seed = Complex64::new(0.4, 0.9);
    let mut r = [seed, seed * seed, seed * seed * seed];
    for _ in 0..500 {
        let mut delta = 0.0_f64;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let step = f(r[i]) / den;
            r[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for z in r.iter_mut() {
        for _ in 0..3 {
            let d = df(*z);
            if d.norm() > 1e-12 {
                *z -= f(*z) / d;
            }
        }
    }
    let mut v = r.to_vec();
    v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    v
}

/// A periodic orbit found by forward iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicOrbit {
    pub points: Vec<Point>,
    /// Eigenvalues of the derivative of the return map, largest modulus first.
    pub multipliers: Vec<Complex64>,
    pub classification: Stability,
}

impl PeriodicOrbit {
    pub fn period(&self) -> usize {
        self.points.len()
    }
}

/// Searches for attracting periodic orbits of period `<= max_period` by
/// iterating a deterministic grid of seeds in `V0`.
///
/// This is a numerical search, not a proof: it can only find sinks whose
/// basins meet the seed grid, and it reports an orbit only after its
/// multipliers have been checked to lie inside the unit circle.
pub fn find_sink_cycles(map: &MapModel, max_period: usize) -> Vec<PeriodicOrbit> {
    let rp = map.rprime();
    let per_axis: usize = match map.layout().naxes() {
        4 => 7,
        _ => 41,
    };
    let naxes = map.layout().naxes();
    let total = per_axis.pow(naxes as u32);
    let coord = |i: usize| -rp + (2.0 * rp) * (i as f64 + 0.5) / per_axis as f64;

    let mut found: Vec<PeriodicOrbit> = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut axes = vec![0.0; naxes];
        for ax in axes.iter_mut() {
            *ax = coord(rem % per_axis);
            rem /= per_axis;
        }
        let mut p = map.axes_point(&axes);
        let mut escaped = false;
        for _ in 0..3000 {
            p = map.apply(&p);
            if !(map.sup_norm(&p) < 1e6) {
                escaped = true;
                break;
            }
        }
        if escaped {
            continue;
        }
        if found.iter().any(|o| o.points.iter().any(|q| dist(map, q, &p) < 1e-6)) {
            continue;
        }
        if let Some(orbit) = detect_cycle(map, p, max_period) {
            if orbit.classification == Stability::Sink {
                found.push(orbit);
            }
        }
    }
    found
}

fn dist(map: &MapModel, p: &Point, q: &Point) -> f64 {
    let d = [p[0] - q[0], p[1] - q[1]];
    map.sup_norm(&d)
}

fn detect_cycle(map: &MapModel, start: Point, max_period: usize) -> Option<PeriodicOrbit> {
    let scale = 1.0 + map.sup_norm(&start);
    let mut p = start;
    let mut pts = vec![start];
    for _ in 1..=max_period {
        p = map.apply(&p);
        if dist(map, &p, &start) < 1e-9 * scale {
            let multipliers = cycle_multipliers(map, &pts);
            let classification = classify(&multipliers);
            return Some(PeriodicOrbit { points: pts, multipliers, classification });
        }
        pts.push(p);
    }
    None
}

fn cycle_multipliers(map: &MapModel, pts: &[Point]) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m = [[one, zero], [zero, one]];
    for p in pts {
        let j = map.jacobian(p);
        m = matmul(&j, &m);
    }
    if map.kind().is_henon() {
        eigenvalues2(&m).to_vec()
    } else {
        vec![m[0][0]]
    }
}

pub(crate) fn matmul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn henon(a: &str, c: &str) -> MapModel {
        MapModel::new(MapKind::HenonComplex, Some(a), c, None).unwrap()
    }

    #[test]
    fn per31_sink_matches_published_values() {
        let m = henon("0.3", "-1.17");
        let fps = fixed_points(&m);
        let sink = fps.iter().find(|f| f.classification == Stability::Sink).unwrap();
        assert!((sink.location[0].re + 0.612).abs() < 5e-4);
        assert!((sink.eigenvalues[0].re + 0.885).abs() < 5e-4);
        assert!((sink.eigenvalues[1].re + 0.34).abs() < 5e-3);
    }

    #[test]
    fn per31_saddle_unstable_eigenvalue() {
        let m = henon("0.3", "-1.17");
        let fps = fixed_points(&m);
        let saddle = fps.iter().find(|f| f.classification == Stability::Saddle).unwrap();
        let z = (1.3 + (1.69f64 + 4.68).sqrt()) / 2.0;
        let lam = z + (z * z - 0.3).sqrt();
        assert!((saddle.location[0].re - z).abs() < 1e-12);
        assert!((saddle.location[0].re - 1.911943).abs() < 1e-6);
        assert!((saddle.eigenvalues[0].re - lam).abs() < 1e-12);
        assert!((lam - 3.7438).abs() < 1e-4);
    }

    #[test]
    fn origin_is_sink_for_c_zero() {
        let m = henon("0.5", "0");
        let fps = fixed_points(&m);
        let origin = fps.iter().find(|f| f.location[0].norm() < 1e-15).unwrap();
        assert_eq!(origin.classification, Stability::Sink);
        for ev in &origin.eigenvalues {
            assert!(ev.re.abs() < 1e-15 && (ev.im.abs() - 0.5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn fixed_points_are_fixed() {
        let maps = [
            henon("0.3", "-1.17"),
            henon("0.15", "-1.1875"),
            henon("-0.74", "-2.75"),
            henon("0.2,0.1", "-0.5,0.3"),
            MapModel::new(MapKind::QuadPoly, None, "-1", None).unwrap(),
            MapModel::new(MapKind::CubicPoly, Some("0,0.1"), "-0.19,1.1", None).unwrap(),
        ];
        for m in &maps {
            let fps = fixed_points(m);
            assert!(!fps.is_empty());
            for f in fps {
                let img = m.apply(&f.location);
                assert!(m.sup_norm(&[img[0] - f.location[0], img[1] - f.location[1]]) < 1e-12, "{}", m.describe());
                if m.kind().is_henon() {
                    let a = m.a().unwrap().value();
                    for l in &f.eigenvalues {
                        let z = f.location[0];
                        assert!((l * l - 2.0 * z * l + a).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn double_root_is_flagged() {
        // 4c = (1+a)^2 gives a double root of z^2 - (1+a) z + c.
        let m = henon("0.5", "0.5625");
        let fps = fixed_points(&m);
        assert!(fps.iter().all(|f| f.degenerate));
    }

    #[test]
    fn alt_basilica_has_attracting_two_cycle() {
        let m = henon("0.15", "-1.1875");
        let sinks = find_sink_cycles(&m, 8);
        assert!(sinks.iter().any(|o| o.period() == 2), "{sinks:?}");
        assert!(fixed_points(&m).iter().all(|f| f.classification != Stability::Sink));
    }

    #[test]
    fn per31_has_fixed_and_three_cycle_sinks() {
        let m = henon("0.3", "-1.17");
        let sinks = find_sink_cycles(&m, 8);
        let periods: Vec<usize> = sinks.iter().map(|o| o.period()).collect();
        assert!(periods.contains(&1) && periods.contains(&3), "{periods:?}");
    }

    #[test]
    fn horseshoe_has_no_sinks() {
        let m = henon("-0.74", "-2.75");
        assert!(find_sink_cycles(&m, 8).is_empty());
        assert!(fixed_points(&m).iter().all(|f| f.classification != Stability::Sink));
    }
}
