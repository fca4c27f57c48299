use crate::ia::{BoxRegion, Interval};
use crate::maps::MapModel;

/// `epsilon'` for a Hénon map: `delta + eps (1 + |a| + 2R') + eps^2`.
pub fn epsilon_prime(epsilon: f64, delta: f64, rprime: f64, a_mod: f64) -> f64 {
    delta + epsilon * (1.0 + a_mod + 2.0 * rprime) + epsilon * epsilon
}

/// Growth factor `r = sum_{k>=2} T_k eps^(k-1) + max(1, T_1 + |a|)`, so that
/// images of `eps`-boxes have side at most `eps (1 + r)`.
pub fn r_coefficient(epsilon: f64, taylor: &[f64], a_mod: f64) -> f64 {
    let higher: f64 = taylor.iter().enumerate().skip(1).map(|(i, t)| t * epsilon.powi(i as i32)).sum();
    higher + (taylor[0] + a_mod).max(1.0)
}

/// `epsilon' = delta + eps (1 + r)` from Taylor bounds `[T_1, T_2, ...]`.
///
/// With `T = [2R', 1]` this is [`epsilon_prime`].
pub fn epsilon_prime_general(epsilon: f64, delta: f64, taylor: &[f64], a_mod: f64) -> f64 {
    delta + epsilon * (1.0 + r_coefficient(epsilon, taylor, a_mod))
}

/// `eta`, the positive root of `t^2 + t (2R' + |a| + 1) - delta`.
pub fn eta_henon(delta: f64, rprime: f64, a_mod: f64) -> f64 {
    let b = 2.0 * rprime + a_mod + 1.0;
    // Rationalized form of (-b + sqrt(b^2 + 4 delta)) / 2.
    2.0 * delta / (b + (b * b + 4.0 * delta).sqrt())
}

/// `delta' = min(eta, delta0')` for a Hénon map.
pub fn delta_prime(delta: f64, rprime: f64, a_mod: f64, delta0_prime: f64) -> f64 {
    eta_henon(delta, rprime, a_mod).min(delta0_prime)
}

fn edge_poly_coeffs(taylor: &[f64], a_mod: f64) -> (f64, &[f64]) {
    ((taylor[0] + a_mod + 1.0).max(2.0), &taylor[1..])
}

/// Smallest positive root of `sum_{k>=2} T_k t^k + t max(2, T_1 + |a| + 1) - delta`.
pub fn eta_general(delta: f64, taylor: &[f64], a_mod: f64) -> f64 {
    let (b, higher) = edge_poly_coeffs(taylor, a_mod);
    let q = |t: f64| -> (f64, f64) {
        let mut v = b * t - delta;
        let mut dv = b;
        for (i, tk) in higher.iter().enumerate() {
            let k = i as i32 + 2;
            v += tk * t.powi(k);
            dv += f64::from(k) * tk * t.powi(k - 1);
        }
        (v, dv)
    };
    // q is convex and increasing on t > 0 and q(delta / b) >= 0, so Newton
    // from the right decreases monotonically onto the root.
    let mut t = delta / b;
    for _ in 0..100 {
        let (v, dv) = q(t);
        let next = t - v / dv;
        if !(next < t) {
            break;
        }
        t = next;
    }
    t
}

/// `delta' = min(eta, delta0')` from Taylor bounds.
pub fn delta_prime_general(delta: f64, taylor: &[f64], a_mod: f64, delta0_prime: f64) -> f64 {
    eta_general(delta, taylor, a_mod).min(delta0_prime)
}

/// Upper bound on `epsilon'` with every operation rounded upward.
pub fn epsilon_prime_upper(epsilon: f64, delta: f64, taylor: &[f64], a_mod: f64) -> f64 {
    let e = Interval::point(epsilon);
    let mut higher = Interval::ZERO;
    let mut pow = Interval::ONE;
    for t in &taylor[1..] {
        pow = pow * e;
        higher = higher + Interval::point(*t) * pow;
    }
    let lead = (Interval::point(taylor[0]) + Interval::point(a_mod)).hi().max(1.0);
    let r = higher + Interval::point(lead);
    (Interval::point(delta) + e * (Interval::ONE + r)).hi()
}

/// Lower bound on `delta'`: a `t` at which the edge polynomial is certified negative.
pub fn delta_prime_lower(delta: f64, taylor: &[f64], a_mod: f64, delta0_prime: f64) -> f64 {
    let b = Interval::point((taylor[0] + a_mod + 1.0).max(2.0));
    let q_hi = |t: f64| {
        let ti = Interval::point(t);
        let mut v = b * ti - Interval::point(delta);
        let mut pow = ti;
        for tk in &taylor[1..] {
            pow = pow * ti;
            v = v + Interval::point(*tk) * pow;
        }
        v.hi()
    };
    let (mut lo, mut hi) = (0.0_f64, eta_general(delta, taylor, a_mod) * 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q_hi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.min(delta0_prime)
}

/// Measured over-enclosure of the interval extension on `boxes`.
///
/// For each box, `F(B)` is compared against the hull of `f` at a grid of
/// `per_axis` points per axis; the result is the largest gap between the two
/// hulls. This only estimates the rounding defect from below and is reported
/// as a diagnostic.
pub fn enclosure_defect(map: &MapModel, boxes: &[BoxRegion], per_axis: usize) -> f64 {
    let per_axis = per_axis.max(2);
    let naxes = map.layout().naxes();
    let mut worst = 0.0_f64;
    for b in boxes {
        let image = map.image(b);
        let mut hull: Option<BoxRegion> = None;
        for idx in 0..per_axis.pow(naxes as u32) {
            let mut rem = idx;
            let coords: Vec<f64> = b
                .axes()
                .iter()
                .map(|ax| {
                    let i = rem % per_axis;
                    rem /= per_axis;
                    ax.lo() + (ax.hi() - ax.lo()) * i as f64 / (per_axis - 1) as f64
                })
                .collect();
            let img = map.point_box(&map.apply(&map.axes_point(&coords)));
            hull = Some(hull.map_or(img, |h| h.hull(&img)));
        }
        if let Some(h) = hull {
            for (f, s) in image.axes().iter().zip(h.axes()) {
                worst = worst.max(s.lo() - f.lo()).max(f.hi() - s.hi());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_inputs() {
        assert_eq!(epsilon_prime(0.0, 0.0, 2.0, 0.3), 0.0);
        assert!(eta_henon(1e-300, 2.0, 0.3) < 1e-300);
    }

    #[test]
    fn general_matches_henon_special_case() {
        for &(eps, rp, a) in &[(0.09, 2.84, 0.74), (0.04016, 2.57, 0.25), (0.3, 1.0, 0.0)] {
            let t = [2.0 * rp, 1.0];
            let d = eps / 1000.0;
            let e1 = epsilon_prime(eps, d, rp, a);
            let e2 = epsilon_prime_general(eps, d, &t, a);
            assert!((e1 - e2).abs() <= 1e-15 * e1);
            let h1 = eta_henon(d, rp, a);
            let h2 = eta_general(d, &t, a);
            assert!((h1 - h2).abs() <= 1e-14 * h1, "{h1} {h2}");
        }
    }

    #[test]
    fn eta_is_root_and_below_delta() {
        let taylor = [3.0 * 4.41 + 0.03, 6.3, 1.0];
        for &d in &[1e-2, 1e-5, 1e-9] {
            let eta = eta_general(d, &taylor, 0.0);
            let b = taylor[0] + 1.0;
            let q = taylor[2] * eta.powi(3) + taylor[1] * eta * eta + b * eta - d;
            assert!(q.abs() < 1e-15 * d.max(1e-300) * 10.0, "{q}");
            assert!(eta < d && eta > 0.0);
        }
    }

    #[test]
    fn conservative_bounds_bracket_nearest() {
        let t = [5.14, 1.0];
        let e = epsilon_prime_general(0.04016, 4.016e-5, &t, 0.25);
        assert!(epsilon_prime_upper(0.04016, 4.016e-5, &t, 0.25) >= e);
        let d = delta_prime_general(4.016e-5, &t, 0.25, 1.0);
        let dl = delta_prime_lower(4.016e-5, &t, 0.25, 1.0);
        assert!(dl <= d && (d - dl) / d < 1e-12);
    }
}
