//! Adaptive subdivision of the trapping box.

mod selector;
mod tree;

pub use selector::{
    largest_singular_value, sink_basin_selector, SinkBasinSelector, DEFAULT_SINK_ITERATES, DEFAULT_SINK_THRESHOLD,
};
pub use tree::{Address, BoxTree, LeafId, NodeStatus, PruneOptions, SubdivideReport, DEFAULT_MAX_DEPTH};
