use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ia::{BoxRegion, ComplexInterval, Interval, Layout};

/// A point of the phase space. One-dimensional maps only use the first entry;
/// real Hénon maps keep both imaginary parts at zero.
pub type Point = [Complex64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    /// `(x, y) -> (x^2 + c - a y, x)` on C^2.
    HenonComplex,
    /// The same formula restricted to R^2 (real `a`, `c`).
    HenonReal,
    /// `z -> z^2 + c` on C.
    QuadPoly,
    /// `z -> z^3 - 3 a^2 z + c` on C.
    CubicPoly,
}

impl MapKind {
    pub fn layout(self) -> Layout {
        match self {
            MapKind::HenonComplex => Layout::Complex2,
            MapKind::HenonReal => Layout::Real2,
            MapKind::QuadPoly | MapKind::CubicPoly => Layout::Complex1,
        }
    }

    pub fn is_henon(self) -> bool {
        matches!(self, MapKind::HenonComplex | MapKind::HenonReal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MapKind::HenonComplex => "henon_complex",
            MapKind::HenonReal => "henon_real",
            MapKind::QuadPoly => "quad_poly",
            MapKind::CubicPoly => "cubic_poly",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "henon_complex" | "henon" => MapKind::HenonComplex,
            "henon_real" | "real_henon" | "realhenon" => MapKind::HenonReal,
            "quad_poly" | "quad" => MapKind::QuadPoly,
            "cubic_poly" | "cubic" => MapKind::CubicPoly,
            _ => return Err(Error::usage(format!("unknown map kind {s:?}"))),
        })
    }
}

/// A complex parameter as given by the user.
///
/// `text` is kept verbatim so models serialize losslessly; `enclosure` is the
/// outward hull used in interval evaluation and `value` the round-to-nearest
/// double used in point orbits and reporting formulas.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    text: String,
    enclosure: ComplexInterval,
    value: Complex64,
}

impl Param {
    /// Parses `"re"` or `"re,im"`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (re, im, text) = match text.split_once(',') {
            Some((re, im)) => (re.trim(), im.trim(), format!("{},{}", re.trim(), im.trim())),
            None => (text, "0", text.to_string()),
        };
        let re_iv = Interval::hull_decimal(re)?;
        let im_iv = Interval::hull_decimal(im)?;
        let value = Complex64::new(re.parse().unwrap_or(re_iv.mid()), im.parse().unwrap_or(im_iv.mid()));
        Ok(Param { text, enclosure: ComplexInterval::new(re_iv, im_iv), value })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn enclosure(&self) -> ComplexInterval {
        self.enclosure
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn is_real(&self) -> bool {
        self.enclosure.im == Interval::ZERO
    }

    pub fn is_zero(&self) -> bool {
        self.enclosure == ComplexInterval::ZERO
    }
}

/// A dynamical system together with its trapping data.
#[derive(Clone, Debug)]
pub struct MapModel {
    kind: MapKind,
    a: Option<Param>,
    c: Param,
    rprime: f64,
    delta0_prime: f64,
    // Cached enclosures for the hot evaluation paths.
    a_enc: ComplexInterval,
    inv_a_enc: Option<ComplexInterval>,
    three_a_sq_enc: ComplexInterval,
}

impl MapModel {
    /// Builds a map and its trapping box.
    ///
    /// `rprime` defaults to `1.05 R`; either way it is snapped up to a multiple
    /// of 2^-12 so that grid coordinates are exact dyadic numbers.
    pub fn new(kind: MapKind, a: Option<&str>, c: &str, rprime: Option<f64>) -> Result<Self> {
        let c = Param::parse(c)?;
        let a = match (kind, a) {
            (MapKind::QuadPoly, None) => None,
            (MapKind::QuadPoly, Some(_)) => {
                return Err(Error::usage("quadratic polynomial takes no `a` parameter"))
            }
            (_, None) => return Err(Error::usage(format!("{kind} needs an `a` parameter"))),
            (_, Some(s)) => Some(Param::parse(s)?),
        };
        if kind.is_henon() {
            let a = a.as_ref().expect("checked above");
            if a.enclosure().modulus().lo() <= 0.0 {
                return Err(Error::usage("Hénon map requires a != 0"));
            }
        }
        if kind == MapKind::HenonReal {
            let a = a.as_ref().expect("checked above");
            if !a.is_real() || !c.is_real() {
                return Err(Error::usage("real Hénon map requires real a and c"));
            }
        }
        let a_enc = a.as_ref().map(|p| p.enclosure()).unwrap_or(ComplexInterval::ZERO);
        let inv_a_enc = if kind.is_henon() { Some(a_enc.recip()?) } else { None };
        let three_a_sq_enc = a_enc.square().scale(Interval::point(3.0));

        let mut map = MapModel { kind, a, c, rprime: 0.0, delta0_prime: 0.0, a_enc, inv_a_enc, three_a_sq_enc };
        let radius = super::trapping_radius(&map);
        let requested = rprime.unwrap_or(1.05 * radius);
        let snapped = super::snap_rprime(requested);
        let (_, delta0) = super::trapping_box(&map, snapped)?;
        map.rprime = snapped;
        map.delta0_prime = delta0;
        Ok(map)
    }

    #[inline]
    pub fn kind(&self) -> MapKind {
        self.kind
    }

    #[inline]
    pub fn layout(&self) -> Layout {
        self.kind.layout()
    }

    pub fn a(&self) -> Option<&Param> {
        self.a.as_ref()
    }

    pub fn c(&self) -> &Param {
        &self.c
    }

    /// Half side of the trapping box `V0`.
    #[inline]
    pub fn rprime(&self) -> f64 {
        self.rprime
    }

    pub fn delta0_prime(&self) -> f64 {
        self.delta0_prime
    }

    /// `|a|` of the Hénon Jacobian determinant; zero for one-dimensional maps.
    pub fn jacobian_a_mod(&self) -> f64 {
        match (&self.a, self.kind.is_henon()) {
            (Some(a), true) => a.value().norm(),
            _ => 0.0,
        }
    }

    /// Bounds `T_k >= |p^(k)(z)| / k!` over `|z| <= R'` for the polynomial `p`
    /// driving the map, as `[T_1, T_2, ...]`.
    pub fn taylor_bounds(&self, rprime: f64) -> Vec<f64> {
        match self.kind {
            MapKind::HenonComplex | MapKind::HenonReal | MapKind::QuadPoly => vec![2.0 * rprime, 1.0],
            MapKind::CubicPoly => {
                let a2 = self.a.as_ref().map(|a| a.value().norm_sqr()).unwrap_or(0.0);
                vec![3.0 * rprime * rprime + 3.0 * a2, 3.0 * rprime, 1.0]
            }
        }
    }

    /// The trapping box `V0 = {|x| <= R', |y| <= R'}`.
    pub fn v0(&self) -> BoxRegion {
        BoxRegion::centered_cube(self.layout(), self.rprime)
    }

    // ---- interval extensions ----

    /// `F(B)`, an enclosure of `f(B)`.
    #[inline]
    pub fn image(&self, b: &BoxRegion) -> BoxRegion {
        debug_assert_eq!(b.layout(), self.layout());
        let layout = self.layout();
        let c = self.c.enclosure();
        match self.kind {
            MapKind::HenonComplex | MapKind::HenonReal => {
                let x = b.coord(0);
                let y = b.coord(1);
                let nx = x.square() + c - self.a_enc * y;
                BoxRegion::from_complex(layout, &[nx, x]).expect("layout matches")
            }
            MapKind::QuadPoly => {
                let z = b.coord(0);
                BoxRegion::from_complex(layout, &[z.square() + c]).expect("layout matches")
            }
            MapKind::CubicPoly => {
                let z = b.coord(0);
                let nz = z * (z.square() - self.three_a_sq_enc) + c;
                BoxRegion::from_complex(layout, &[nz]).expect("layout matches")
            }
        }
    }

    /// Enclosure of `f^{-1}(B)` for Hénon maps: `(x, y) -> (y, (y^2 + c - x) / a)`.
    pub fn preimage(&self, b: &BoxRegion) -> Result<BoxRegion> {
        let inv_a = self
            .inv_a_enc
            .ok_or_else(|| Error::usage(format!("{} has no inverse", self.kind)))?;
        Ok(self.preimage_with(b, inv_a))
    }

    #[inline]
    pub(crate) fn preimage_with(&self, b: &BoxRegion, inv_a: ComplexInterval) -> BoxRegion {
        let x = b.coord(0);
        let y = b.coord(1);
        let ny = (y.square() + self.c.enclosure() - x) * inv_a;
        BoxRegion::from_complex(self.layout(), &[y, ny]).expect("layout matches")
    }

    pub(crate) fn inverse_factor(&self) -> Option<ComplexInterval> {
        self.inv_a_enc
    }

    // ---- point arithmetic (non-rigorous) ----

    #[inline]
    pub fn apply(&self, p: &Point) -> Point {
        let c = self.c.value();
        match self.kind {
            MapKind::HenonComplex | MapKind::HenonReal => {
                let a = self.a_value();
                [p[0] * p[0] + c - a * p[1], p[0]]
            }
            MapKind::QuadPoly => [p[0] * p[0] + c, Complex64::new(0.0, 0.0)],
            MapKind::CubicPoly => {
                let a = self.a_value();
                let z = p[0];
                [z * (z * z - 3.0 * a * a) + c, Complex64::new(0.0, 0.0)]
            }
        }
    }

    /// Point inverse; `None` for one-dimensional maps.
    pub fn apply_inverse(&self, p: &Point) -> Option<Point> {
        if !self.kind.is_henon() {
            return None;
        }
        let a = self.a_value();
        Some([p[1], (p[1] * p[1] + self.c.value() - p[0]) / a])
    }

    /// Jacobian matrix at `p`. One-dimensional maps return `[[P'(z), 0], [0, 0]]`.
    pub fn jacobian(&self, p: &Point) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            MapKind::HenonComplex | MapKind::HenonReal => [[2.0 * p[0], -self.a_value()], [one, zero]],
            MapKind::QuadPoly => [[2.0 * p[0], zero], [zero, zero]],
            MapKind::CubicPoly => {
                let a = self.a_value();
                [[3.0 * p[0] * p[0] - 3.0 * a * a, zero], [zero, zero]]
            }
        }
    }

    fn a_value(&self) -> Complex64 {
        self.a.as_ref().map(|a| a.value()).unwrap_or_default()
    }

    /// Sup-norm over real and imaginary parts of all coordinates.
    pub fn sup_norm(&self, p: &Point) -> f64 {
        let n = self.layout().ncoords();
        p[..n].iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max)
    }

    /// Real coordinates of a point in the box layout order.
    pub fn point_axes(&self, p: &Point) -> Vec<f64> {
        match self.layout() {
            Layout::Complex2 => vec![p[0].re, p[0].im, p[1].re, p[1].im],
            Layout::Complex1 => vec![p[0].re, p[0].im],
            Layout::Real2 => vec![p[0].re, p[1].re],
        }
    }

    /// Inverse of [`point_axes`](Self::point_axes).
    pub fn axes_point(&self, axes: &[f64]) -> Point {
        let z = |re: f64, im: f64| Complex64::new(re, im);
        match self.layout() {
            Layout::Complex2 => [z(axes[0], axes[1]), z(axes[2], axes[3])],
            Layout::Complex1 => [z(axes[0], axes[1]), z(0.0, 0.0)],
            Layout::Real2 => [z(axes[0], 0.0), z(axes[1], 0.0)],
        }
    }

    /// Degenerate box at a point.
    pub fn point_box(&self, p: &Point) -> BoxRegion {
        BoxRegion::point(self.layout(), &self.point_axes(p)).expect("layout matches")
    }

    /// One-line description of the parameters.
    pub fn describe(&self) -> String {
        match &self.a {
            Some(a) => format!("{} a={} c={} R'={}", self.kind, a.text(), self.c.text(), self.rprime),
            None => format!("{} c={} R'={}", self.kind, self.c.text(), self.rprime),
        }
    }
}

/// `image_extension` in free-function form.
pub fn image_extension(map: &MapModel, b: &BoxRegion) -> Result<BoxRegion> {
    if b.layout() != map.layout() {
        return Err(Error::usage(format!("box layout {:?} does not match map {}", b.layout(), map.kind())));
    }
    Ok(map.image(b))
}

/// `preimage_extension` in free-function form.
pub fn preimage_extension(map: &MapModel, b: &BoxRegion) -> Result<BoxRegion> {
    if b.layout() != map.layout() {
        return Err(Error::usage(format!("box layout {:?} does not match map {}", b.layout(), map.kind())));
    }
    map.preimage(b)
}
