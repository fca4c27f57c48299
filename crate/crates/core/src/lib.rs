//! Box chain recurrent models of complex Hénon maps and polynomial maps of C.
//!
//! The pipeline subdivides a trapping box, prunes boxes whose interval iterates
//! leave it, links boxes whose fattened interval images meet, and keeps the
//! strongly connected part of the resulting graph. Accuracy bounds for the
//! resulting cover and sink/Julia separation thresholds live in [`bounds`].

pub mod error;
pub mod ia;
pub mod maps;
pub mod boxtree;
pub mod chain_graph;
pub mod bounds;
pub mod cli;
pub mod render;

pub use error::{Error, Result};
