//! `qedc` compiles arbitrary quantum circuits with quantum error detection.
//!
//! The crate is organised as a pipeline of passes that all consume and produce
//! the same [`circuit::Circuit`] representation:
//!
//! - [`analysis`]: gate-set transpilation, Clifford region discovery and
//!   automatic detection-code selection.
//! - [`pcs`]: Pauli check sandwiching around the largest Clifford payload.
//! - [`iceberg`]: encoding into the `[[k+2, k, 2]]` Iceberg code with periodic
//!   syndrome cycles.
//! - [`layout`]: VF2 layouts, detection-aware SWAP routing and ASAP scheduling.
//! - [`sim`]: statevector and stabilizer backends with Monte-Carlo depolarizing
//!   noise.
//! - [`postprocess`]: postselection, keep-rate estimation and check
//!   extrapolation.
//! - [`driver`]: the file-based stages used by the `qedc` command line tool.
//!
//! Algebra shared by every pass lives in [`pauli`] and [`clifford`].

pub mod analysis;
pub mod circuit;
pub mod clifford;
pub mod driver;
pub mod iceberg;
pub mod layout;
pub mod meta;
pub mod pauli;
pub mod pcs;
pub mod postprocess;
pub mod sim;

pub use circuit::{Circuit, Gate, GateKind, Instruction, Register};
pub use clifford::CliffordTableau;
pub use pauli::{Pauli, PauliString, Phase};
