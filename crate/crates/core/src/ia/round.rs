//! Directed rounding on top of the default round-to-nearest mode.
//!
//! Every primitive computes the round-to-nearest result `r` and then recovers
//! the exact rounding error with an error-free transformation (TwoSum for
//! addition, an FMA residual for products, quotients and square roots). The
//! sign of that error tells which neighbour of `r` bounds the exact value, so
//! results are the tightest representable directed roundings: exact
//! operations stay exact and inexact ones are off by exactly one ulp.
//!
//! The hardware rounding mode is never touched, so these functions are safe
//! to call from any thread.
//!
//! Residuals lose exactness in the subnormal range; there the result is simply
//! nudged one ulp outward, which is still an enclosure.

/// Below this magnitude FMA residuals may be inexact.
const TINY: f64 = 1.0e-290;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
fn both_finite(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite()
}

/// Overflow to +inf of a finite operation rounds down to `f64::MAX`.
#[inline]
fn saturate_down(r: f64, finite_inputs: bool) -> f64 {
    if r == f64::INFINITY && finite_inputs {
        f64::MAX
    } else {
        r
    }
}

#[inline]
fn saturate_up(r: f64, finite_inputs: bool) -> f64 {
    if r == f64::NEG_INFINITY && finite_inputs {
        f64::MIN
    } else {
        r
    }
}

#[inline]
pub fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return saturate_down(s, both_finite(a, b));
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return saturate_up(s, both_finite(a, b));
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

#[inline]
pub fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

/// Sign of `a*b - RN(a*b)`: -1, 0 or 1. `None` when the residual is unreliable.
#[inline]
fn mul_err_sign(a: f64, b: f64, p: f64) -> Option<f64> {
    if p.abs() < TINY {
        return None;
    }
    Some(a.mul_add(b, -p))
}

#[inline]
pub fn mul_down(a: f64, b: f64) -> f64 {
    // 0 * inf is 0 for endpoint products: infinity is never a member of an interval.
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return saturate_down(p, both_finite(a, b));
    }
    match mul_err_sign(a, b, p) {
        Some(e) if e < 0.0 => p.next_down(),
        Some(_) => p,
        None => p.next_down(),
    }
}

#[inline]
pub fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return saturate_up(p, both_finite(a, b));
    }
    match mul_err_sign(a, b, p) {
        Some(e) if e > 0.0 => p.next_up(),
        Some(_) => p,
        None => p.next_up(),
    }
}

/// Sign of `a/b - RN(a/b)`, or `None` when the residual is unreliable.
#[inline]
fn div_err_sign(a: f64, b: f64, q: f64) -> Option<f64> {
    if q.abs() < TINY || a.abs() < TINY {
        return None;
    }
    let r = (-q).mul_add(b, a);
    Some(if b > 0.0 { r } else { -r })
}

/// Caller guarantees `b != 0`.
#[inline]
pub fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if b.is_infinite() {
        return if a.is_infinite() { f64::NEG_INFINITY } else { 0.0_f64.min((a / b).next_down()) };
    }
    let q = a / b;
    if !q.is_finite() {
        return saturate_down(q, a.is_finite());
    }
    match div_err_sign(a, b, q) {
        Some(e) if e < 0.0 => q.next_down(),
        Some(_) => q,
        None => q.next_down(),
    }
}

#[inline]
pub fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    if b.is_infinite() {
        return if a.is_infinite() { f64::INFINITY } else { 0.0_f64.max((a / b).next_up()) };
    }
    let q = a / b;
    if !q.is_finite() {
        return saturate_up(q, a.is_finite());
    }
    match div_err_sign(a, b, q) {
        Some(e) if e > 0.0 => q.next_up(),
        Some(_) => q,
        None => q.next_up(),
    }
}

/// Caller guarantees `x >= 0`.
#[inline]
pub fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    if s == 0.0 || s.is_infinite() {
        return s;
    }
    if x < TINY {
        return s.next_down().max(0.0);
    }
    if (-s).mul_add(s, x) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if s.is_infinite() {
        return s;
    }
    if x < TINY {
        return if x == 0.0 { 0.0 } else { s.next_up() };
    }
    if (-s).mul_add(s, x) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_operations_stay_exact() {
        assert_eq!(add_down(1.0, 3.0), 4.0);
        assert_eq!(add_up(1.0, 3.0), 4.0);
        assert_eq!(mul_down(1.5, 2.0), 3.0);
        assert_eq!(mul_up(1.5, 2.0), 3.0);
        assert_eq!(div_down(1.0, 4.0), 0.25);
        assert_eq!(div_up(1.0, 4.0), 0.25);
        assert_eq!(sqrt_down(9.0), 3.0);
        assert_eq!(sqrt_up(9.0), 3.0);
    }

    #[test]
    fn inexact_operations_bracket_by_one_ulp() {
        let lo = add_down(0.1, 0.2);
        let hi = add_up(0.1, 0.2);
        assert_eq!(lo.next_up(), hi);

        let lo = div_down(1.0, 3.0);
        let hi = div_up(1.0, 3.0);
        assert_eq!(lo.next_up(), hi);
        assert!(lo < 1.0 / 3.0 || hi > 1.0 / 3.0);

        let lo = sqrt_down(2.0);
        let hi = sqrt_up(2.0);
        assert_eq!(lo.next_up(), hi);
        assert!(mul_up(lo, lo) <= 2.0 || mul_down(hi, hi) >= 2.0);
    }

    #[test]
    fn overflow_saturates() {
        assert_eq!(add_up(f64::MAX, f64::MAX), f64::INFINITY);
        assert_eq!(add_down(f64::MAX, f64::MAX), f64::MAX);
        assert_eq!(mul_down(-f64::MAX, 2.0), f64::NEG_INFINITY);
        assert_eq!(mul_up(-f64::MAX, 2.0), f64::MIN);
        assert_eq!(mul_down(0.0, f64::INFINITY), 0.0);
    }
}
