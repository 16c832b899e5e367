//! Oracles and generators shared by the integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as C64;
use qedc::analysis::InteractionGraph;
use qedc::layout::CouplingGraph;
use qedc::{Circuit, GateKind, Instruction, PauliString};
use rand::Rng;

pub type Dense = Vec<Vec<C64>>;

/// Signed permutation of a phased Pauli string: `P|j⟩ = amp_j |target_j⟩`.
/// Basis bit `q` is qubit `q`.
pub fn pauli_action(p: &PauliString) -> Vec<(usize, C64)> {
    let n = p.num_qubits();
    let global = C64::i().powu(u32::from(p.phase().exponent()));
    (0..1usize << n)
        .map(|j| {
            let mut amp = global;
            let mut target = j;
            for q in 0..n {
                let (x, z) = (p.x_bit(q), p.z_bit(q));
                let bit = (j >> q) & 1 == 1;
                // Y = i·X·Z acting on |bit⟩.
                if x && z {
                    amp *= C64::i();
                }
                if z && bit {
                    amp = -amp;
                }
                if x {
                    target ^= 1 << q;
                }
            }
            (target, amp)
        })
        .collect()
}

/// Dense matrix of a phased Pauli string.
pub fn pauli_matrix(p: &PauliString) -> Dense {
    let dim = 1usize << p.num_qubits();
    let mut m = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for (j, (target, amp)) in pauli_action(p).into_iter().enumerate() {
        m[target][j] = amp;
    }
    m
}

/// `max |U·P − Q·U|` for `columns[j] = U|j⟩`; zero exactly when `U P U† = Q`.
pub fn conjugation_defect(columns: &[Vec<C64>], p: &PauliString, q: &PauliString) -> f64 {
    let (pa, qa) = (pauli_action(p), pauli_action(q));
    let mut worst: f64 = 0.0;
    for (j, &(pt, pamp)) in pa.iter().enumerate() {
        // Column j of U·P is amp·U|π(j)⟩; column j of Q·U permutes U|j⟩.
        let mut qu = vec![C64::new(0.0, 0.0); columns.len()];
        for (i, &u) in columns[j].iter().enumerate() {
            let (qt, qamp) = qa[i];
            qu[qt] += qamp * u;
        }
        for (i, &v) in qu.iter().enumerate() {
            worst = worst.max((pamp * columns[pt][i] - v).norm());
        }
    }
    worst
}

/// `columns[j]` is the image of basis state `j`; returns the matrix with `m[i][j]`.
pub fn from_columns(columns: &[Vec<C64>]) -> Dense {
    let dim = columns.len();
    (0..dim)
        .map(|i| (0..dim).map(|j| columns[j][i]).collect())
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn dagger(a: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[j][i].conj()).collect())
        .collect()
}

pub fn max_abs_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

/// `|⟨a|b⟩|`.
pub fn overlap(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .norm()
}

const CLIFFORD_1Q: [GateKind; 6] = [
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
];
const CLIFFORD_2Q: [GateKind; 3] = [GateKind::Cx, GateKind::Cz, GateKind::Swap];
const ROT_1Q: [GateKind; 3] = [GateKind::Rz, GateKind::Rx, GateKind::Ry];

fn two_distinct<R: Rng>(rng: &mut R, n: usize) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// One random Clifford instruction, including quarter-turn rotations.
pub fn random_clifford_instruction<R: Rng>(rng: &mut R, n: usize) -> Instruction {
    let roll = rng.gen_range(0..10);
    if n >= 2 && roll < 4 {
        let (a, b) = two_distinct(rng, n);
        Instruction::new(CLIFFORD_2Q[rng.gen_range(0..3)], &[a, b])
    } else if roll < 8 {
        Instruction::new(CLIFFORD_1Q[rng.gen_range(0..6)], &[rng.gen_range(0..n)])
    } else {
        let k = rng.gen_range(-3i32..=3) as f64;
        Instruction::rotation(
            ROT_1Q[rng.gen_range(0..3)],
            k * FRAC_PI_2,
            &[rng.gen_range(0..n)],
        )
    }
}

pub fn random_clifford_circuit<R: Rng>(rng: &mut R, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(n, 0);
    for _ in 0..len {
        c.push(random_clifford_instruction(rng, n));
    }
    c
}

/// A non-Clifford instruction: a generic rotation or a T gate.
pub fn random_non_clifford<R: Rng>(rng: &mut R, n: usize) -> Instruction {
    let q = rng.gen_range(0..n);
    match rng.gen_range(0..5) {
        0 => Instruction::new(GateKind::T, &[q]),
        1 if n >= 2 => {
            let (a, b) = two_distinct(rng, n);
            Instruction::rotation(GateKind::Rzz, rng.gen_range(0.1..1.4), &[a, b])
        }
        _ => Instruction::rotation(ROT_1Q[rng.gen_range(0..3)], rng.gen_range(0.1..1.4), &[q]),
    }
}

/// Non-Clifford prefix, a Clifford block of at least `min_block` gates,
/// non-Clifford suffix, then measurement of every qubit.
pub fn random_circuit_with_clifford_region<R: Rng>(
    rng: &mut R,
    n: usize,
    min_block: usize,
) -> Circuit {
    let mut c = Circuit::new(n, n);
    for _ in 0..rng.gen_range(1..=n + 1) {
        c.push(random_non_clifford(rng, n));
    }
    for _ in 0..rng.gen_range(min_block..=min_block + 6) {
        c.push(random_clifford_instruction(rng, n));
    }
    for _ in 0..rng.gen_range(0..=3) {
        c.push(random_non_clifford(rng, n));
    }
    for q in 0..n {
        c.measure(q, q);
    }
    c
}

/// Generic circuit over every gate kind the simulator accepts.
pub fn random_unitary_circuit<R: Rng>(rng: &mut R, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(n, 0);
    for _ in 0..len {
        if rng.gen_bool(0.5) {
            c.push(random_clifford_instruction(rng, n));
        } else {
            c.push(random_non_clifford(rng, n));
        }
    }
    c
}

pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> InteractionGraph {
    let mut g = InteractionGraph::new(n);
    for &(a, b) in edges {
        g.add_edge(a, b, 1);
    }
    g
}

/// Random simple graph with `n` nodes and edge probability `p`.
pub fn random_edges<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Every injective map of `ig`'s nodes into `cg` that sends each edge onto a coupling edge.
pub fn brute_force_monomorphisms(
    ig: &InteractionGraph,
    cg: &CouplingGraph,
) -> BTreeSet<Vec<usize>> {
    fn extend(
        map: &mut Vec<usize>,
        used: &mut [bool],
        ig: &InteractionGraph,
        cg: &CouplingGraph,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        let v = map.len();
        if v == ig.num_nodes {
            let ok = ig.edges.keys().all(|&(a, b)| cg.has_edge(map[a], map[b]));
            if ok {
                out.insert(map.clone());
            }
            return;
        }
        for p in 0..cg.num_qubits() {
            if used[p] {
                continue;
            }
            used[p] = true;
            map.push(p);
            extend(map, used, ig, cg, out);
            map.pop();
            used[p] = false;
        }
    }
    let mut out = BTreeSet::new();
    let mut used = vec![false; cg.num_qubits()];
    extend(&mut Vec::new(), &mut used, ig, cg, &mut out);
    out
}

/// Ring QAOA layer: `h` on every qubit, `rzz(γ)` on each ring edge, `rx(β)` on every qubit.
pub fn qaoa_ring(n: usize, gamma: f64, beta: f64) -> Circuit {
    let mut c = Circuit::new(n, 0);
    for q in 0..n {
        c.h(q);
    }
    for q in 0..n {
        c.rzz(gamma, q, (q + 1) % n);
    }
    for q in 0..n {
        c.rx(beta, q);
    }
    c
}

/// Outcome of injecting every single-qubit data Pauli at every boundary of an
/// Iceberg circuit (before the readout measurements).
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct FaultAudit {
    pub total: usize,
    /// Deterministically caught by a verification/syndrome bit or the readout parity.
    pub flagged: usize,
    /// Not caught, but the Z-basis readout distribution is unchanged.
    pub harmless: usize,
    /// `(boundary, fault)` pairs that are neither.
    pub failures: Vec<(usize, String)>,
}

pub fn iceberg_fault_audit(logical: &Circuit, cycles: usize) -> FaultAudit {
    use qedc::iceberg::build_iceberg_unmeasured;
    use qedc::sim::stabilizer::{run_with_injections, z_marginal_signature};
    use qedc::{Pauli, Phase};
    use rand::SeedableRng;

    let (enc, meta) = build_iceberg_unmeasured(logical, cycles).unwrap();
    let n = enc.num_qubits();
    let flag_bits: BTreeSet<usize> = {
        let mut bits = BTreeSet::new();
        for name in std::iter::once(&meta.verify_register).chain(meta.syndrome_register.as_ref()) {
            let (off, size) = enc.creg_offset(name).unwrap();
            bits.extend(off..off + size);
        }
        bits
    };
    let data = meta.data_qubits.clone();
    let parity =
        PauliString::from_factors(n, &data.iter().map(|&q| (q, Pauli::Z)).collect::<Vec<_>>());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let ideal = run_with_injections(&enc, &[], &mut rng).unwrap();
    let ideal_sig = z_marginal_signature(&ideal.state, &data);
    assert_eq!(ideal.state.expectation_sign(&parity), Some(1));

    let mut audit = FaultAudit::default();
    for before in 0..=enc.instructions.len() {
        for &q in &data {
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                audit.total += 1;
                let fault = PauliString::single(n, q, p).with_phase(Phase::ONE);
                let run = run_with_injections(
                    &enc,
                    &[qedc::sim::Injection {
                        before,
                        pauli: fault.clone(),
                    }],
                    &mut rng,
                )
                .unwrap();
                let flag_hit = run.measurements.iter().any(|m| {
                    m.clbit.is_some_and(|c| flag_bits.contains(&c))
                        && m.outcome.deterministic
                        && m.outcome.value
                });
                let parity_hit = run.state.expectation_sign(&parity) == Some(-1);
                if flag_hit || parity_hit {
                    audit.flagged += 1;
                    continue;
                }
                let all_deterministic = run
                    .measurements
                    .iter()
                    .filter(|m| m.clbit.is_some_and(|c| flag_bits.contains(&c)))
                    .all(|m| m.outcome.deterministic);
                if all_deterministic && z_marginal_signature(&run.state, &data) == ideal_sig {
                    audit.harmless += 1;
                } else {
                    audit.failures.push((before, fault.to_string()));
                }
            }
        }
    }
    audit
}

/// Random logical circuit whose rotations all sit at quarter turns.
pub fn random_clifford_logical<R: Rng>(rng: &mut R, k: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(k, 0);
    for _ in 0..len {
        let angle = rng.gen_range(1..=3) as f64 * FRAC_PI_2;
        match rng.gen_range(0..5) {
            0 => c.rz(angle, rng.gen_range(0..k)),
            1 => c.rx(angle, rng.gen_range(0..k)),
            2 => c.h(rng.gen_range(0..k)),
            3 => {
                let (a, b) = two_distinct(rng, k);
                c.rzz(angle, a, b)
            }
            _ => {
                let (a, b) = two_distinct(rng, k);
                c.rxx(angle, a, b)
            }
        };
    }
    c
}
