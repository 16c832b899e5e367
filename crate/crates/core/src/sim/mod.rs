//! Desk-scale execution backends.
//!
//! [`statevector`] is the dense reference simulator (also the oracle for every
//! equivalence check), [`stabilizer`] runs Clifford circuits with optional
//! Pauli injection, and [`sampler`] draws shots under a [`NoiseModel`].

pub mod frame;
pub mod noise;
pub mod sampler;
pub mod stabilizer;
pub mod statevector;

pub use noise::NoiseModel;
pub use sampler::{sample, sample_detailed, Counts, SampleStats};
pub use stabilizer::{stabilizer_run, Injection, StabilizerRun, StabilizerState};
pub use statevector::{exact_distribution, statevector, unitary, StateVector};

use crate::circuit::GateKind;

/// Largest register the dense simulator accepts.
pub const MAX_STATEVECTOR_QUBITS: usize = 14;
/// Largest register the stabilizer simulator accepts.
pub const MAX_STABILIZER_QUBITS: usize = 64;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("{n} qubits exceeds the simulator limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("instruction {index} measures or resets mid-circuit")]
    MidCircuitMeasurement { index: usize },
    #[error("instruction {index} ({gate}) is not Clifford")]
    NonClifford { index: usize, gate: GateKind },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
}
