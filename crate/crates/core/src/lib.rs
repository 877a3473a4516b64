//! Verification of detectability, diagnosability, predictability and opacity
//! for labeled finite-state automata.

pub mod artifact;
pub mod automaton;
pub mod cli;
pub mod compose;
pub mod concealment;
pub mod derive;
pub mod gallery;
mod graph;
pub mod inference;
pub mod io;
pub mod legacy;
pub mod oracle;
pub mod verify;
pub mod witness;

pub use automaton::{AnnotatedModel, FaultSpec, Lfsa, RawLfsa, SecretSpec, StateSet};
pub use verify::{verify, PropertyKind, Verdict};
pub use witness::{Detectability, OpacityVariant, Witness};
