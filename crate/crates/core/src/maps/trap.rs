use super::{MapKind, MapModel};
use crate::error::{Error, Result};
use crate::ia::{BoxRegion, Interval};

/// Fractional bits kept when snapping `R'`.
pub const RPRIME_FRACTION_BITS: i32 = 12;

/// Rounds `r` up to the next multiple of `2^-12`.
pub fn snap_rprime(r: f64) -> f64 {
    let scale = f64::from(1u32 << RPRIME_FRACTION_BITS);
    (r * scale).ceil() / scale
}

/// Interval enclosure of the escape polynomial `q(r)`.
///
/// Hénon: `r^2 - (1+|a|) r - |c|`; quadratic: `r^2 - r - |c|`;
/// cubic: `r^3 - 3|a|^2 r - |c| - r`. The map escapes where `q > 0`.
pub(crate) fn escape_poly(map: &MapModel, r: Interval) -> Interval {
    let c_mod = map.c().enclosure().modulus();
    let a_mod = map.a().map(|a| a.enclosure().modulus()).unwrap_or(Interval::ZERO);
    match map.kind() {
        MapKind::HenonComplex | MapKind::HenonReal => r.square() - (Interval::ONE + a_mod) * r - c_mod,
        MapKind::QuadPoly => r.square() - r - c_mod,
        MapKind::CubicPoly => {
            let three_a2 = Interval::point(3.0) * a_mod.square();
            r * r.square() - three_a2 * r - c_mod - r
        }
    }
}

/// Upper enclosure of the root `R >= 1` of the escape polynomial.
///
/// Bisects on `[1, 3 + |a| + |c|]`, keeping an upper end at which `q > 0` is
/// certified in interval arithmetic, until the bracket is two adjacent
/// doubles. A midpoint where `q` evaluates to exactly zero is returned as is.
pub fn trapping_radius(map: &MapModel) -> f64 {
    let c_mod = map.c().enclosure().modulus().hi();
    let a_mod = map.a().map(|a| a.enclosure().modulus().hi()).unwrap_or(0.0);
    let q = |r: f64| escape_poly(map, Interval::point(r));

    let mut lo = 1.0_f64;
    if q(lo) == Interval::ZERO || q(lo).lo() > 0.0 {
        return lo;
    }
    let mut hi = 3.0 + a_mod + c_mod;
    while q(hi).lo() <= 0.0 {
        hi *= 2.0;
    }
    while lo.next_up() < hi {
        let mid = 0.5 * lo + 0.5 * hi;
        if mid <= lo || mid >= hi {
            break;
        }
        let v = q(mid);
        if v == Interval::ZERO {
            return mid;
        }
        if v.lo() > 0.0 {
            hi = mid;
        } else if v.hi() < 0.0 {
            lo = mid;
        } else {
            break;
        }
    }
    hi
}

/// The trapping box `V0 = {|x| <= R', |y| <= R'}` and `delta0' = q(R') / 2`.
///
/// `delta0'` is a certified lower bound, so every `delta0'`-pseudo orbit
/// stays in `V0`.
pub fn trapping_box(map: &MapModel, rprime: f64) -> Result<(BoxRegion, f64)> {
    let radius = trapping_radius(map);
    if !(rprime > radius) {
        return Err(Error::usage(format!("R' = {rprime} must exceed the trapping radius R = {radius}")));
    }
    let q = escape_poly(map, Interval::point(rprime));
    let delta0 = q.lo() / 2.0;
    if !(delta0 > 0.0) {
        return Err(Error::usage(format!("R' = {rprime} too close to R = {radius}: delta0' not positive")));
    }
    Ok((BoxRegion::centered_cube(map.layout(), rprime), delta0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn henon(a: &str, c: &str, rp: f64) -> MapModel {
        MapModel::new(MapKind::HenonComplex, Some(a), c, Some(rp)).unwrap()
    }

    #[test]
    fn quadratic_c2_has_radius_two() {
        let m = MapModel::new(MapKind::QuadPoly, None, "2", Some(3.0)).unwrap();
        assert_eq!(trapping_radius(&m), 2.0);
    }

    #[test]
    fn quadratic_c0_has_radius_one() {
        let m = MapModel::new(MapKind::QuadPoly, None, "0", Some(2.0)).unwrap();
        assert_eq!(trapping_radius(&m), 1.0);
    }

    #[test]
    fn henon_radius_matches_closed_form() {
        let m = henon("0.15", "-1.1875", 1.9);
        let r = trapping_radius(&m);
        let closed = 0.5 * (1.15 + (1.15f64 * 1.15 + 4.0 * 1.1875).sqrt());
        assert!(r >= closed && r - closed < 1e-14, "{r} vs {closed}");
        assert!((r - 1.80712).abs() < 1e-5);
        assert!(r < 1.9);
    }

    #[test]
    fn delta0_prime_formula() {
        let m = henon("0.15", "-1.1875", 1.9);
        let (_, d) = trapping_box(&m, 1.9).unwrap();
        assert!((d - 0.11875).abs() < 1e-12);
        assert!(d <= 0.11875);

        let m = henon("0.3", "-1.17", 2.01);
        let (_, d) = trapping_box(&m, 2.01).unwrap();
        assert!((d - (4.0401 - 2.613 - 1.17) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rprime_at_radius_is_rejected() {
        let m = MapModel::new(MapKind::QuadPoly, None, "2", Some(3.0)).unwrap();
        assert!(matches!(trapping_box(&m, 2.0), Err(Error::Usage(_))));
        assert!(MapModel::new(MapKind::QuadPoly, None, "2", Some(2.0)).is_err());
    }

    #[test]
    fn cubic_rprime_two_suffices_in_stated_range() {
        // |c| < 2 and |a| <= sqrt(2/3)
        for (a, c) in [("0.8,0", "1.99,0"), ("0,0.81", "0,-1.9"), ("0,0.1", "-0.19,1.1")] {
            let m = MapModel::new(MapKind::CubicPoly, Some(a), c, Some(2.5)).unwrap();
            assert!(trapping_radius(&m) < 2.0, "a={a} c={c}");
        }
    }

    #[test]
    fn snapping_rounds_up_to_dyadic() {
        let s = snap_rprime(1.9);
        assert!(s >= 1.9 && s - 1.9 < 1.0 / 4096.0);
        assert_eq!((s * 4096.0).fract(), 0.0);
        assert_eq!(snap_rprime(2.0), 2.0);
    }
}
