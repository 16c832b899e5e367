//! Greedy shortest-path SWAP routing that steers around protected qubits.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use super::graph::{CouplingGraph, Layout};
use crate::circuit::{Circuit, GateKind, Instruction, Register};

/// Extra cost for entering a node that holds a protected qubit.
pub const PROTECTED_PENALTY: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct RoutedCircuit {
    /// Circuit over physical qubits.
    pub circuit: Circuit,
    /// Logical → physical before the first instruction.
    pub initial: Vec<usize>,
    /// Logical → physical after the last instruction.
    pub final_map: Vec<usize>,
    pub swaps: usize,
    /// Inserted SWAPs as physical pairs, in order.
    pub swap_pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RouteError {
    #[error("layout maps {got} qubits but the circuit has {expected}")]
    LayoutSize { got: usize, expected: usize },
    #[error("layout is not an injective map into the coupling graph")]
    BadLayout,
    #[error("physical qubits {0} and {1} are in different components of the coupling graph")]
    Disconnected(usize, usize),
}

/// Routes `circ` under `layout`. `protected` lists logical qubits whose
/// physical homes paths avoid whenever possible.
pub fn route(
    circ: &Circuit,
    layout: &Layout,
    cg: &CouplingGraph,
    protected: &BTreeSet<usize>,
) -> Result<RoutedCircuit, RouteError> {
    let n = circ.num_qubits();
    let np = cg.num_qubits();
    if layout.map.len() != n {
        return Err(RouteError::LayoutSize {
            got: layout.map.len(),
            expected: n,
        });
    }
    if !layout.is_injective() || layout.map.iter().any(|&p| p >= np) {
        return Err(RouteError::BadLayout);
    }
    let mut l2p = layout.map.clone();
    let mut p2l: Vec<Option<usize>> = vec![None; np];
    for (l, &p) in l2p.iter().enumerate() {
        p2l[p] = Some(l);
    }
    let mut out = Circuit {
        qregs: vec![Register::new("q", np)],
        cregs: circ.cregs.clone(),
        instructions: Vec::new(),
    };
    let mut swap_pairs = Vec::new();

    for inst in &circ.instructions {
        if inst.qubits.len() == 2 && inst.kind() != GateKind::Barrier {
            let (la, lb) = (inst.qubits[0], inst.qubits[1]);
            let (pa, pb) = (l2p[la], l2p[lb]);
            if !cg.has_edge(pa, pb) {
                let (mover, target) = if protected.contains(&la) && !protected.contains(&lb) {
                    (pb, pa)
                } else {
                    (pa, pb)
                };
                let is_protected = |p: usize| p2l[p].is_some_and(|l| protected.contains(&l));
                let path = cheapest_path(cg, mover, target, is_protected)
                    .ok_or(RouteError::Disconnected(pa, pb))?;
                for w in path[..path.len() - 1].windows(2) {
                    let (x, y) = (w[0], w[1]);
                    out.instructions
                        .push(Instruction::new(GateKind::Swap, &[x, y]));
                    swap_pairs.push((x, y));
                    p2l.swap(x, y);
                    for p in [x, y] {
                        if let Some(l) = p2l[p] {
                            l2p[l] = p;
                        }
                    }
                }
            }
        }
        let mut mapped = inst.clone();
        for q in &mut mapped.qubits {
            *q = l2p[*q];
        }
        out.instructions.push(mapped);
    }
    Ok(RoutedCircuit {
        circuit: out,
        initial: layout.map.clone(),
        final_map: l2p,
        swaps: swap_pairs.len(),
        swap_pairs,
    })
}

/// Dijkstra from `src` to `dst` where entering a node costs 1, plus
/// [`PROTECTED_PENALTY`] for protected nodes other than `dst`. Ties resolve
/// toward lower node indices.
fn cheapest_path(
    cg: &CouplingGraph,
    src: usize,
    dst: usize,
    is_protected: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let np = cg.num_qubits();
    let mut dist = vec![usize::MAX; np];
    let mut prev = vec![usize::MAX; np];
    let mut heap = BinaryHeap::new();
    dist[src] = 0;
    heap.push(Reverse((0usize, src)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == dst {
            break;
        }
        for &v in cg.neighbors(u) {
            let step = if v != dst && is_protected(v) {
                1 + PROTECTED_PENALTY
            } else {
                1
            };
            let nd = d + step;
            if nd < dist[v] || (nd == dist[v] && u < prev[v]) {
                dist[v] = nd;
                prev[v] = u;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    if dist[dst] == usize::MAX {
        return None;
    }
    let mut path = vec![dst];
    while *path.last().expect("non-empty") != src {
        path.push(prev[*path.last().expect("non-empty")]);
    }
    path.reverse();
    Some(path)
}

impl RoutedCircuit {
    /// Drops physical qubits that are never used and are outside the layout,
    /// renumbering the rest in ascending order. Returns the kept physical indices.
    pub fn compact(&mut self) -> Vec<usize> {
        let np = self.circuit.num_qubits();
        let mut used = vec![false; np];
        for &p in self.initial.iter().chain(&self.final_map) {
            used[p] = true;
        }
        for inst in &self.circuit.instructions {
            for &q in &inst.qubits {
                used[q] = true;
            }
        }
        let kept: Vec<usize> = (0..np).filter(|&p| used[p]).collect();
        let mut index = vec![usize::MAX; np];
        for (i, &p) in kept.iter().enumerate() {
            index[p] = i;
        }
        for inst in &mut self.circuit.instructions {
            for q in &mut inst.qubits {
                *q = index[*q];
            }
        }
        for p in self.initial.iter_mut().chain(self.final_map.iter_mut()) {
            *p = index[*p];
        }
        for (a, b) in &mut self.swap_pairs {
            *a = index[*a];
            *b = index[*b];
        }
        self.circuit.qregs = vec![Register::new("q", kept.len())];
        kept
    }
}
