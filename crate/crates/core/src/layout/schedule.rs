use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;

/// ASAP time steps for every instruction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub steps: Vec<usize>,
    pub depth: usize,
    /// Per qubit: steps between its first and last instruction with nothing scheduled on it.
    pub idle: Vec<usize>,
}

/// Places each instruction one step after the latest predecessor sharing a
/// qubit or classical bit.
pub fn schedule(circ: &Circuit) -> Schedule {
    let mut qubit_ready = vec![0usize; circ.num_qubits()];
    let mut clbit_ready = vec![0usize; circ.num_clbits()];
    let mut first = vec![usize::MAX; circ.num_qubits()];
    let mut busy = vec![0usize; circ.num_qubits()];
    let mut steps = Vec::with_capacity(circ.instructions.len());
    for inst in &circ.instructions {
        let step = inst
            .qubits
            .iter()
            .map(|&q| qubit_ready[q])
            .chain(inst.clbits.iter().map(|&c| clbit_ready[c]))
            .max()
            .unwrap_or(0);
        for &q in &inst.qubits {
            qubit_ready[q] = step + 1;
            first[q] = first[q].min(step);
            busy[q] += 1;
        }
        for &c in &inst.clbits {
            clbit_ready[c] = step + 1;
        }
        steps.push(step);
    }
    let depth = qubit_ready
        .iter()
        .chain(&clbit_ready)
        .copied()
        .max()
        .unwrap_or(0);
    let idle = (0..circ.num_qubits())
        .map(|q| {
            if busy[q] == 0 {
                0
            } else {
                qubit_ready[q] - first[q] - busy[q]
            }
        })
        .collect();
    Schedule { steps, depth, idle }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_single_qubit_gates() {
        let mut c = Circuit::new(2, 0);
        c.h(0).h(1);
        let s = schedule(&c);
        assert_eq!(s.steps, vec![0, 0]);
        assert_eq!(s.depth, 1);
    }

    #[test]
    fn cx_chain_depth() {
        let n = 6;
        let mut c = Circuit::new(n, 0);
        for q in 1..n {
            c.cx(q - 1, q);
        }
        assert_eq!(schedule(&c).depth, n - 1);
    }

    #[test]
    fn early_measurement_and_idle() {
        let mut c = Circuit::new(3, 1);
        c.h(2).measure(2, 0).cx(0, 1).cx(0, 1).cx(0, 1).cx(1, 2);
        let s = schedule(&c);
        assert!(s.steps[1] < s.depth - 1);
        assert_eq!(s.idle[2], 1);
    }
}
