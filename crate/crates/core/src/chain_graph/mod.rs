//! Box chain models: edges from fattened interval images, strongly connected
//! components, and the recurrent subgraph.

mod graph;
mod model;
mod scc;

pub use graph::{
    build_edges, build_edges_with_budget, edge_predicate, ChainGraph, BYTES_PER_EDGE, DEFAULT_DELTA_RATIO,
};
pub use model::{
    classify_components, recurrent_model, sink_points, ComponentReport, RecurrentModel, SinkLocation, SinkPoint,
};
pub use scc::{scc_decompose, SccLabeling};
