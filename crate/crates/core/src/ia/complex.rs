use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::Interval;
use crate::error::Result;

/// The rectangle `{x + iy : x in re, y in im}`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub const ZERO: ComplexInterval = ComplexInterval { re: Interval::ZERO, im: Interval::ZERO };

    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn point(z: Complex64) -> Self {
        ComplexInterval { re: Interval::point(z.re), im: Interval::point(z.im) }
    }

    pub fn real(re: Interval) -> Self {
        ComplexInterval { re, im: Interval::ZERO }
    }

    /// Enclosure of `{z^2}`; uses the dedicated real square for the real part.
    pub fn square(self) -> Self {
        ComplexInterval {
            re: self.re.square() - self.im.square(),
            im: (self.re * self.im).double(),
        }
    }

    pub fn scale(self, k: Interval) -> Self {
        ComplexInterval { re: self.re * k, im: self.im * k }
    }

    /// Enclosure of `{|z|^2}`.
    pub fn norm_sqr(self) -> Interval {
        self.re.square() + self.im.square()
    }

    /// Enclosure of `{|z|}`.
    pub fn modulus(self) -> Interval {
        // norm_sqr is never negative, so sqrt cannot fail.
        self.norm_sqr().sqrt().expect("non-negative")
    }

    /// Enclosure of `{1/z}`; fails when the rectangle may contain zero.
    pub fn recip(self) -> Result<Self> {
        let d = self.norm_sqr();
        Ok(ComplexInterval { re: self.re.checked_div(d)?, im: (-self.im).checked_div(d)? })
    }

    pub fn checked_div(self, rhs: ComplexInterval) -> Result<Self> {
        Ok(self * rhs.recip()?)
    }

    pub fn contains(self, z: Complex64) -> bool {
        self.re.contains(z.re) && self.im.contains(z.im)
    }

    pub fn mid(self) -> Complex64 {
        Complex64::new(self.re.mid(), self.im.mid())
    }
}

impl Add for ComplexInterval {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        ComplexInterval { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for ComplexInterval {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        ComplexInterval { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Neg for ComplexInterval {
    type Output = Self;
    fn neg(self) -> Self {
        ComplexInterval { re: -self.re, im: -self.im }
    }
}

impl Mul for ComplexInterval {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        ci_mul(self, rhs)
    }
}

/// Rectangle multiplication from four real interval products.
#[inline]
pub fn ci_mul(a: ComplexInterval, b: ComplexInterval) -> ComplexInterval {
    ComplexInterval {
        re: a.re * b.re - a.im * b.im,
        im: a.re * b.im + a.im * b.re,
    }
}
