//! Symbolic pulse sequences, their compilation and the named library.

pub mod compile;
pub mod decouple;
pub mod generator;
pub mod library;
pub mod sequence;

pub use compile::{apply_sequence, apply_to_states, compile};
pub use decouple::{decoupled_coupling, decoupled_coupling_cycles};
pub use generator::{Generator, Sites, Term};
pub use library::{library, Branch, Direction, Entry};
pub use sequence::{concat, ElementKind, PulseElement, PulseSequence};
