use std::fmt;

use super::round::sub_down;
use super::{ComplexInterval, Interval};
use crate::error::{Error, Result};

/// Which space a [`BoxRegion`] lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Layout {
    /// `(x, y)` in C^2, stored as `[Re x, Im x, Re y, Im y]`.
    Complex2,
    /// `z` in C, stored as `[Re z, Im z]`.
    Complex1,
    /// `(x, y)` in R^2, stored as `[x, y]`; imaginary parts are pinned to zero.
    Real2,
}

impl Layout {
    /// Number of real axes.
    #[inline]
    pub const fn naxes(self) -> usize {
        match self {
            Layout::Complex2 => 4,
            Layout::Complex1 | Layout::Real2 => 2,
        }
    }

    /// Number of complex coordinates.
    #[inline]
    pub const fn ncoords(self) -> usize {
        match self {
            Layout::Complex2 | Layout::Real2 => 2,
            Layout::Complex1 => 1,
        }
    }
}

/// A closed axis-parallel box: a vector of real intervals.
///
/// Sup-norm balls are boxes, so the geometry here (neighbourhoods, distances)
/// is the sup-norm over all real components.
#[derive(Clone, Copy, PartialEq)]
pub struct BoxRegion {
    layout: Layout,
    axes: [Interval; 4],
}

/// Result of [`box_predicates`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxRelation {
    pub intersects: bool,
    pub contains: bool,
    /// Lower bound on the sup-norm distance between the boxes.
    pub sup_distance: f64,
}

impl BoxRegion {
    /// Builds a box from one interval per real axis.
    pub fn new(layout: Layout, axes: &[Interval]) -> Result<Self> {
        if axes.len() != layout.naxes() {
            return Err(Error::usage(format!(
                "{layout:?} box needs {} axes, got {}",
                layout.naxes(),
                axes.len()
            )));
        }
        let mut a = [Interval::ZERO; 4];
        a[..axes.len()].copy_from_slice(axes);
        Ok(BoxRegion { layout, axes: a })
    }

    /// Builds a box from complex coordinates. For `Real2` only the real parts are kept.
    pub fn from_complex(layout: Layout, coords: &[ComplexInterval]) -> Result<Self> {
        if coords.len() != layout.ncoords() {
            return Err(Error::usage(format!(
                "{layout:?} box needs {} complex coordinates, got {}",
                layout.ncoords(),
                coords.len()
            )));
        }
        let mut a = [Interval::ZERO; 4];
        match layout {
            Layout::Complex2 => {
                a = [coords[0].re, coords[0].im, coords[1].re, coords[1].im];
            }
            Layout::Complex1 => {
                a[0] = coords[0].re;
                a[1] = coords[0].im;
            }
            Layout::Real2 => {
                a[0] = coords[0].re;
                a[1] = coords[1].re;
            }
        }
        Ok(BoxRegion { layout, axes: a })
    }

    /// The cube `[-r, r]` on every real axis.
    pub fn centered_cube(layout: Layout, r: f64) -> Self {
        let side = Interval::from_sorted(-r, r);
        let mut a = [Interval::ZERO; 4];
        a[..layout.naxes()].fill(side);
        BoxRegion { layout, axes: a }
    }

    /// Degenerate box at a point given by its real coordinates.
    pub fn point(layout: Layout, coords: &[f64]) -> Result<Self> {
        let axes: Vec<Interval> = coords.iter().map(|&x| Interval::point(x)).collect();
        BoxRegion::new(layout, &axes)
    }

    #[inline]
    pub(crate) fn from_axes_unchecked(layout: Layout, axes: [Interval; 4]) -> Self {
        BoxRegion { layout, axes }
    }

    #[inline]
    pub fn layout(&self) -> Layout {
        self.layout
    }

    #[inline]
    pub fn axes(&self) -> &[Interval] {
        &self.axes[..self.layout.naxes()]
    }

    #[inline]
    pub fn axis(&self, k: usize) -> Interval {
        self.axes()[k]
    }

    /// The `k`-th complex coordinate. In `Real2` the imaginary part is `[0, 0]`.
    #[inline]
    pub fn coord(&self, k: usize) -> ComplexInterval {
        match self.layout {
            Layout::Complex2 => ComplexInterval::new(self.axes[2 * k], self.axes[2 * k + 1]),
            Layout::Complex1 => {
                assert_eq!(k, 0, "C box has a single coordinate");
                ComplexInterval::new(self.axes[0], self.axes[1])
            }
            Layout::Real2 => ComplexInterval::real(self.axes[k]),
        }
    }

    /// Largest width over all real axes, rounded up.
    pub fn side_length(&self) -> f64 {
        self.axes().iter().map(|a| a.width()).fold(0.0, f64::max)
    }

    /// Box midpoint, one real coordinate per axis.
    pub fn center(&self) -> Vec<f64> {
        self.axes().iter().map(|a| a.mid()).collect()
    }

    /// Sup-norm `r`-neighbourhood, endpoints rounded outward.
    pub fn widen(&self, r: f64) -> BoxRegion {
        box_widen(self, r)
    }

    fn check_same_layout(&self, other: &BoxRegion) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::usage(format!(
                "box dimension mismatch: {:?} vs {:?}",
                self.layout, other.layout
            )));
        }
        Ok(())
    }

    /// Closed-box intersection test. Panics on layout mismatch; see [`box_predicates`]
    /// for the checked form.
    #[inline]
    pub fn intersects(&self, other: &BoxRegion) -> bool {
        debug_assert_eq!(self.layout, other.layout);
        self.axes().iter().zip(other.axes()).all(|(a, b)| a.intersects(*b))
    }

    /// Whether `self` contains `other`.
    #[inline]
    pub fn encloses(&self, other: &BoxRegion) -> bool {
        debug_assert_eq!(self.layout, other.layout);
        self.axes().iter().zip(other.axes()).all(|(a, b)| a.encloses(*b))
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        p.len() == self.layout.naxes() && self.axes().iter().zip(p).all(|(a, &x)| a.contains(x))
    }

    /// `None` when the boxes are disjoint.
    pub fn intersection(&self, other: &BoxRegion) -> Option<BoxRegion> {
        debug_assert_eq!(self.layout, other.layout);
        let mut axes = self.axes;
        for k in 0..self.layout.naxes() {
            axes[k] = self.axes[k].intersection(other.axes[k])?;
        }
        Some(BoxRegion { layout: self.layout, axes })
    }

    /// Smallest box containing both.
    pub fn hull(&self, other: &BoxRegion) -> BoxRegion {
        debug_assert_eq!(self.layout, other.layout);
        let mut axes = self.axes;
        for (k, ax) in axes.iter_mut().enumerate().take(self.layout.naxes()) {
            *ax = self.axes[k].hull(other.axes[k]);
        }
        BoxRegion { layout: self.layout, axes }
    }
}

impl fmt::Debug for BoxRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.layout)?;
        f.debug_list().entries(self.axes()).finish()
    }
}

/// `N_r(B)`: every endpoint moved outward by at least `r`.
pub fn box_widen(b: &BoxRegion, r: f64) -> BoxRegion {
    assert!(r >= 0.0, "negative widening radius {r}");
    let mut axes = b.axes;
    for ax in axes.iter_mut().take(b.layout.naxes()) {
        *ax = ax.widen(r);
    }
    BoxRegion { layout: b.layout, axes }
}

/// Intersection, containment and a lower bound on the sup-norm distance.
pub fn box_predicates(a: &BoxRegion, b: &BoxRegion) -> Result<BoxRelation> {
    a.check_same_layout(b)?;
    let intersects = a.intersects(b);
    let contains = a.encloses(b);
    let sup_distance = if intersects {
        0.0
    } else {
        a.axes()
            .iter()
            .zip(b.axes())
            .map(|(x, y)| {
                let gap = if x.hi() < y.lo() {
                    sub_down(y.lo(), x.hi())
                } else if y.hi() < x.lo() {
                    sub_down(x.lo(), y.hi())
                } else {
                    0.0
                };
                gap.max(0.0)
            })
            .fold(0.0, f64::max)
    };
    Ok(BoxRelation { intersects, contains, sup_distance })
}
