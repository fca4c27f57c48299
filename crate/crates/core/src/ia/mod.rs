//! Interval arithmetic with outward rounding over R, C and boxes.

mod complex;
mod interval;
mod region;
pub mod round;

pub use complex::{ci_mul, ComplexInterval};
pub use interval::{iv_arith, Interval, IvOp};
pub use region::{box_predicates, box_widen, BoxRegion, BoxRelation, Layout};
