//! JSON model and verdict formats, and DOT export.

mod dot;
mod model;
mod verdict;

pub use dot::{export_dot, GraphView};
pub use model::{
    parse_model, parse_model_with, serialize_model, EventEntry, ModelDocument, ParseError,
    ParseOptions, StateEntry, TransitionEntry, FORMAT_VERSION,
};
pub use verdict::{Parameters, Statistics, Timing, VerdictDocument};
