//! Metadata written next to a compiled circuit and consumed by later stages.

use serde::{Deserialize, Serialize};

use crate::analysis::Code;
use crate::circuit::{Circuit, Register};
use crate::iceberg::IcebergMeta;
use crate::layout::Layout;
use crate::pcs::PcsMeta;

pub const TOOL_VERSION: &str = concat!("qedc ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "lowercase")]
pub enum CodeMeta {
    Pcs(PcsMeta),
    Iceberg(IcebergMeta),
    None { cregs: Vec<Register> },
}

impl CodeMeta {
    pub fn code(&self) -> Code {
        match self {
            CodeMeta::Pcs(_) => Code::Pcs,
            CodeMeta::Iceberg(_) => Code::Iceberg,
            CodeMeta::None { .. } => Code::None,
        }
    }

    pub fn cregs(&self) -> &[Register] {
        match self {
            CodeMeta::Pcs(m) => &m.cregs,
            CodeMeta::Iceberg(m) => &m.cregs,
            CodeMeta::None { cregs } => cregs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompilationMeta {
    pub tool_version: String,
    #[serde(flatten)]
    pub code: CodeMeta,
    /// Initial placement of the encoded circuit's qubits on the coupling graph.
    pub layout: Layout,
    /// Coupling-graph nodes kept in the compiled circuit; compiled qubit `i`
    /// is node `physical_qubits[i]`.
    pub physical_qubits: Vec<usize>,
    /// Encoded qubit → compiled qubit after the last instruction.
    pub final_map: Vec<usize>,
    pub swaps: usize,
    pub depth: usize,
    pub num_qubits: usize,
    pub num_clbits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum MetaMismatch {
    #[error("metadata describes {meta} qubits, circuit has {circuit}")]
    Qubits { meta: usize, circuit: usize },
    #[error("classical registers differ from the metadata")]
    Registers,
    #[error("layout does not cover the encoded qubits")]
    Layout,
}

impl CompilationMeta {
    /// Checks that `circ` is the circuit this metadata was written for.
    pub fn check_circuit(&self, circ: &Circuit) -> Result<(), MetaMismatch> {
        if circ.num_qubits() != self.num_qubits {
            return Err(MetaMismatch::Qubits {
                meta: self.num_qubits,
                circuit: circ.num_qubits(),
            });
        }
        let sized = |r: &[Register]| -> Vec<Register> {
            r.iter().filter(|r| r.size > 0).cloned().collect()
        };
        if sized(&circ.cregs) != sized(self.code.cregs()) || circ.num_clbits() != self.num_clbits {
            return Err(MetaMismatch::Registers);
        }
        if self.layout.map.len() != self.final_map.len() || !self.layout.is_injective() {
            return Err(MetaMismatch::Layout);
        }
        Ok(())
    }
}
