use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::{One, Zero};

use super::round::*;
use crate::error::{Error, Result};

/// A closed real interval `[lo, hi]` with `f64` endpoints.
///
/// All arithmetic rounds outward, so the result of every operation contains
/// the exact real result for every choice of operands in the inputs.
/// Endpoints may saturate to `±inf` on overflow; `lo <= hi` always holds and
/// NaN endpoints are never constructed.
#[derive(Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

/// The arithmetic operations exposed through [`iv_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IvOp {
    Add,
    Sub,
    Mul,
    /// Unary; the second operand is ignored.
    Square,
    Div,
}

/// Dispatches a binary interval operation. Only `Div` can fail.
pub fn iv_arith(op: IvOp, a: Interval, b: Interval) -> Result<Interval> {
    Ok(match op {
        IvOp::Add => a + b,
        IvOp::Sub => a - b,
        IvOp::Mul => a * b,
        IvOp::Square => a.square(),
        IvOp::Div => a.checked_div(b)?,
    })
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::domain("interval endpoint is NaN"));
        }
        if lo > hi {
            return Err(Error::domain(format!("inverted interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    /// Constructor for endpoints already known to be ordered.
    #[inline]
    pub(crate) fn from_sorted(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    #[inline]
    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN point interval");
        Interval { lo: x, hi: x }
    }

    /// Smallest interval with `f64` endpoints containing the decimal number `s`.
    ///
    /// Dyadic decimals such as `0.25` give a degenerate interval; everything
    /// else (e.g. `0.1`, `-1.17`) gives an interval one ulp wide.
    pub fn hull_decimal(s: &str) -> Result<Self> {
        let s = s.trim();
        let x: f64 = s
            .parse()
            .map_err(|_| Error::usage(format!("not a decimal number: {s:?}")))?;
        if !x.is_finite() {
            return Err(Error::usage(format!("decimal out of range: {s:?}")));
        }
        let (num, den) = parse_decimal_exact(s)?;
        match compare_with_float(&num, &den, x) {
            std::cmp::Ordering::Equal => Ok(Interval::point(x)),
            std::cmp::Ordering::Less => Ok(Interval { lo: x.next_down(), hi: x }),
            std::cmp::Ordering::Greater => Ok(Interval { lo: x, hi: x.next_up() }),
        }
    }

    /// Convex hull of two intervals.
    pub fn hull(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Width rounded up.
    #[inline]
    pub fn width(self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    /// Midpoint rounded to nearest; always inside the interval for finite endpoints.
    pub fn mid(self) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return match (self.lo.is_finite(), self.hi.is_finite()) {
                (true, false) => f64::MAX.max(self.lo),
                (false, true) => f64::MIN.min(self.hi),
                _ => 0.0,
            };
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Largest absolute value of a member.
    #[inline]
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value of a member.
    #[inline]
    pub fn mig(self) -> f64 {
        if self.lo > 0.0 {
            self.lo
        } else if self.hi < 0.0 {
            -self.hi
        } else {
            0.0
        }
    }

    #[inline]
    pub fn is_point(self) -> bool {
        self.lo == self.hi
    }

    #[inline]
    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_zero(self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    #[inline]
    pub fn encloses(self, inner: Interval) -> bool {
        self.lo <= inner.lo && inner.hi <= self.hi
    }

    #[inline]
    pub fn intersects(self, other: Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `None` when the intervals are disjoint.
    pub fn intersection(self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// `[lo - r, hi + r]`, rounded outward.
    #[inline]
    pub fn widen(self, r: f64) -> Interval {
        Interval { lo: sub_down(self.lo, r), hi: add_up(self.hi, r) }
    }

    /// Enclosure of `{x*x : x in self}`; never negative.
    pub fn square(self) -> Interval {
        if self.lo >= 0.0 {
            Interval { lo: mul_down(self.lo, self.lo), hi: mul_up(self.hi, self.hi) }
        } else if self.hi <= 0.0 {
            Interval { lo: mul_down(self.hi, self.hi), hi: mul_up(self.lo, self.lo) }
        } else {
            Interval { lo: 0.0, hi: mul_up(self.lo, self.lo).max(mul_up(self.hi, self.hi)) }
        }
    }

    /// Multiplication by two is exact except on overflow.
    #[inline]
    pub fn double(self) -> Interval {
        Interval { lo: add_down(self.lo, self.lo), hi: add_up(self.hi, self.hi) }
    }

    pub fn checked_div(self, rhs: Interval) -> Result<Interval> {
        if rhs.contains_zero() {
            return Err(Error::domain(format!("division by interval {rhs:?} containing zero")));
        }
        let cands_lo = [
            div_down(self.lo, rhs.lo),
            div_down(self.lo, rhs.hi),
            div_down(self.hi, rhs.lo),
            div_down(self.hi, rhs.hi),
        ];
        let cands_hi = [
            div_up(self.lo, rhs.lo),
            div_up(self.lo, rhs.hi),
            div_up(self.hi, rhs.lo),
            div_up(self.hi, rhs.hi),
        ];
        Ok(Interval {
            lo: cands_lo.into_iter().fold(f64::INFINITY, f64::min),
            hi: cands_hi.into_iter().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    /// Square root of the non-negative part. Errors if the interval is entirely negative.
    pub fn sqrt(self) -> Result<Interval> {
        if self.hi < 0.0 {
            return Err(Error::domain(format!("sqrt of negative interval {self:?}")));
        }
        Ok(Interval { lo: sqrt_down(self.lo.max(0.0)), hi: sqrt_up(self.hi) })
    }

    /// `[|x| : x in self]`.
    pub fn abs(self) -> Interval {
        Interval { lo: self.mig(), hi: self.mag() }
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval { lo: add_down(self.lo, rhs.lo), hi: add_up(self.hi, rhs.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval { lo: sub_down(self.lo, rhs.hi), hi: sub_up(self.hi, rhs.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        // Sign-based case split keeps the common cases at two products.
        if a >= 0.0 {
            if c >= 0.0 {
                Interval { lo: mul_down(a, c), hi: mul_up(b, d) }
            } else if d <= 0.0 {
                Interval { lo: mul_down(b, c), hi: mul_up(a, d) }
            } else {
                Interval { lo: mul_down(b, c), hi: mul_up(b, d) }
            }
        } else if b <= 0.0 {
            if c >= 0.0 {
                Interval { lo: mul_down(a, d), hi: mul_up(b, c) }
            } else if d <= 0.0 {
                Interval { lo: mul_down(b, d), hi: mul_up(a, c) }
            } else {
                Interval { lo: mul_down(a, d), hi: mul_up(a, c) }
            }
        } else if c >= 0.0 {
            Interval { lo: mul_down(a, d), hi: mul_up(b, d) }
        } else if d <= 0.0 {
            Interval { lo: mul_down(b, c), hi: mul_up(a, c) }
        } else {
            Interval {
                lo: mul_down(a, d).min(mul_down(b, c)),
                hi: mul_up(a, c).max(mul_up(b, d)),
            }
        }
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

/// Parses a plain or scientific decimal into an exact fraction `num / den`.
fn parse_decimal_exact(s: &str) -> Result<(BigInt, BigInt)> {
    let bad = || Error::usage(format!("not a decimal number: {s:?}"));
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = all_digits.parse().unwrap_or_else(|_| BigInt::zero());
    if negative {
        num = -num;
    }
    let scale = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut den = BigInt::one();
    if scale >= 0 {
        num *= num_traits::pow(ten, scale as usize);
    } else {
        den = num_traits::pow(ten, (-scale) as usize);
    }
    Ok((num, den))
}

/// Compares the exact fraction `num/den` (den > 0) with the finite float `x`.
fn compare_with_float(num: &BigInt, den: &BigInt, x: f64) -> std::cmp::Ordering {
    // x = m * 2^e exactly.
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp_bits == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp_bits - 1075) };
    let mut m = BigInt::from(m) * sign;
    // Compare num/den against m*2^e  <=>  num * 2^-e  vs  m * den  (when e < 0).
    let mut lhs = num.clone();
    if e >= 0 {
        m <<= e as usize;
    } else {
        lhs <<= (-e) as usize;
    }
    let rhs = m * den;
    debug_assert!(den.sign() == Sign::Plus);
    lhs.cmp(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn add_of_dyadic_endpoints_is_exact() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
    }

    #[test]
    fn dedicated_square_is_tight() {
        assert_eq!(iv(-1.0, 1.0).square(), iv(0.0, 1.0));
        assert_eq!(iv(-1.0, 1.0) * iv(-1.0, 1.0), iv(-1.0, 1.0));
        assert_eq!(iv(-3.0, -2.0).square(), iv(4.0, 9.0));
    }

    #[test]
    fn hull_of_non_dyadic_decimal_is_one_ulp() {
        let h = Interval::hull_decimal("0.1").unwrap();
        assert!(h.lo() < h.hi());
        assert_eq!(h.lo().next_up(), h.hi());
        // 0.1 rounds up to the nearest double, so the double is the upper end.
        assert_eq!(h.hi(), 0.1);

        let h = Interval::hull_decimal("-1.17").unwrap();
        assert_eq!(h.lo().next_up(), h.hi());
        assert!(h.contains(-1.17));
    }

    #[test]
    fn hull_of_dyadic_decimal_is_degenerate() {
        assert_eq!(Interval::hull_decimal("0.25").unwrap(), Interval::point(0.25));
        assert_eq!(Interval::hull_decimal("-1.1875").unwrap(), Interval::point(-1.1875));
        assert_eq!(Interval::hull_decimal("3e2").unwrap(), Interval::point(300.0));
        assert_eq!(Interval::hull_decimal("1.5E-1").unwrap().lo(), 0.15);
    }

    #[test]
    fn hull_rejects_garbage() {
        assert!(Interval::hull_decimal("abc").is_err());
        assert!(Interval::hull_decimal("1.2.3").is_err());
        assert!(Interval::hull_decimal("inf").is_err());
    }

    #[test]
    fn division_by_zero_straddling_interval_is_domain_error() {
        assert!(matches!(iv(1.0, 2.0).checked_div(iv(-1.0, 1.0)), Err(Error::Domain(_))));
        assert!(iv(1.0, 2.0).checked_div(iv(0.0, 1.0)).is_err());
        let q = iv(1.0, 2.0).checked_div(iv(4.0, 8.0)).unwrap();
        assert_eq!(q, iv(0.125, 0.5));
    }

    #[test]
    fn new_rejects_inverted() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn overflow_saturates_without_panicking() {
        let big = iv(f64::MAX / 2.0, f64::MAX);
        let s = big * big;
        assert_eq!(s.hi(), f64::INFINITY);
        assert_eq!(s.lo(), f64::MAX);
        let t = big + big;
        assert!(t.lo() <= t.hi());
    }

    #[test]
    fn intersection_of_disjoint_is_none() {
        assert!(iv(0.0, 1.0).intersection(iv(2.0, 3.0)).is_none());
        assert_eq!(iv(0.0, 1.0).intersection(iv(1.0, 3.0)), Some(iv(1.0, 1.0)));
    }
}
