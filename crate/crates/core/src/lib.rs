//! Pulse-level simulation and verification of nuclear-electron quantum
//! cellular automata on alternating chains of ¹⁵N@C60 and ³¹P@C60.

pub mod error;
pub mod linalg;
pub mod pipeline;
pub mod pulse;
pub mod qca;
pub mod register;
pub mod spectra;
pub mod spin;
pub mod suite;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use register::{Register, Role};
pub use spin::{spin_operators, Axis, SpinRep};
pub use system::{ChainSpec, Species, SpeciesConstants};
