//! Quadratic Hénon maps of C^2 and R^2, quadratic and cubic polynomials of C.
//!
//! Each map has two faces: interval extensions used for every rigorous step
//! (box images, preimages, the trapping region) and plain floating-point
//! evaluation used by heuristics (orbit search, refinement selection, pictures).

mod fixed;
mod model;
mod trap;

pub use fixed::{
    classify, eigenvalues2, find_sink_cycles, fixed_points, FixedPointInfo, PeriodicOrbit, Stability,
};
pub(crate) use fixed::matmul;
pub use model::{image_extension, preimage_extension, MapKind, MapModel, Param, Point};
pub use trap::{snap_rprime, trapping_box, trapping_radius, RPRIME_FRACTION_BITS};
