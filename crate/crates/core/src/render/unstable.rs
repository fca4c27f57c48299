use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::{fixed_points, FixedPointInfo, MapKind, MapModel, Point, Stability};

/// `gamma_N(t) = f^N(p + (t / lambda1^N) v1)` with `v1 = (lambda1, 1)`.
///
/// Iterates in coordinates relative to `p`, where the map reads
/// `u -> (2z u1 + u1^2 - a u2, u1)`, so tiny initial displacements keep
/// their relative precision.
#[derive(Clone, Debug)]
pub struct UnstableParam {
    z: Complex64,
    a: Complex64,
    lambda1: Complex64,
    depth: usize,
    scale: Complex64,
}

/// The parameterization of the unstable manifold of a saddle fixed point.
pub fn unstable_parameterization(map: &MapModel, saddle: &FixedPointInfo, depth: usize) -> Result<UnstableParam> {
    if map.kind() != MapKind::HenonComplex {
        return Err(Error::usage("unstable manifold slices need a complex Hénon map"));
    }
    if saddle.classification != Stability::Saddle {
        return Err(Error::usage(format!("fixed point is {:?}, not a saddle", saddle.classification)));
    }
    if depth == 0 {
        return Err(Error::usage("gamma depth must be at least 1"));
    }
    let lambda1 = saddle.eigenvalues[0];
    Ok(UnstableParam {
        z: saddle.location[0],
        a: map.a().expect("Hénon map has a").value(),
        lambda1,
        depth,
        scale: lambda1.powi(-(depth as i32)),
    })
}

/// First saddle fixed point of `map`, if any.
pub fn default_saddle(map: &MapModel) -> Option<FixedPointInfo> {
    fixed_points(map).into_iter().find(|f| f.classification == Stability::Saddle)
}

impl UnstableParam {
    pub fn lambda1(&self) -> Complex64 {
        self.lambda1
    }

    pub fn saddle(&self) -> Point {
        [self.z, self.z]
    }

    pub fn eval(&self, t: Complex64) -> Point {
        let s = t * self.scale;
        let mut u = [s * self.lambda1, s];
        let two_z = 2.0 * self.z;
        for _ in 0..self.depth {
            u = [two_z * u[0] + u[0] * u[0] - self.a * u[1], u[0]];
        }
        [self.z + u[0], self.z + u[1]]
    }
}
