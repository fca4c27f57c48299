//! The command-line driver and its building blocks.

mod app;
mod model_io;
mod pipeline;

pub use app::{exit_code, main_with_args, Cli, Command, Preset, PRESETS};
pub use model_io::{SavedBox, SavedEdge, SavedModel};
pub use pipeline::{Pipeline, RunConfig, RunRecord, Schedule, StepKind, StepRecord};
