//! Monte-Carlo shot sampling under Pauli-twirled depolarizing noise.
//!
//! Every shot owns the RNG stream `(seed, shot)`, so counts do not depend on
//! how shots are spread over threads. Within a shot the draws happen in a
//! fixed order: noise events for every noisy location, then one uniform per
//! simulated mid-circuit measurement or reset, then the final joint sample.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stabilizer::{compile, StabilizerState};
use super::statevector::StateVector;
use super::{NoiseModel, SimError, MAX_STABILIZER_QUBITS, MAX_STATEVECTOR_QUBITS};
use crate::circuit::{Circuit, GateKind};
use crate::clifford::CliffordGate;
use crate::pauli::{Pauli, PauliString};

/// Shot histogram keyed by the repo-wide counts-key convention.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Counts {
    pub fn from_map(counts: BTreeMap<String, u64>) -> Self {
        Counts {
            shots: counts.values().sum(),
            counts,
        }
    }

    /// Normalized frequencies.
    pub fn distribution(&self) -> BTreeMap<String, f64> {
        let total = self.shots.max(1) as f64;
        self.counts
            .iter()
            .map(|(k, &v)| (k.clone(), v as f64 / total))
            .collect()
    }

    pub fn is_consistent(&self) -> bool {
        self.counts.values().sum::<u64>() == self.shots
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleStats {
    /// Shots in which at least one Pauli was injected.
    pub noisy_shots: u64,
    /// Total number of injected Paulis over all shots.
    pub injected: u64,
}

/// Samples `shots` executions of `circ` under `noise`.
pub fn sample(
    circ: &Circuit,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Counts, SimError> {
    sample_detailed(circ, noise, shots, seed).map(|(counts, _)| counts)
}

/// Like [`sample`], also reporting how much noise was injected.
pub fn sample_detailed(
    circ: &Circuit,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<(Counts, SampleStats), SimError> {
    let diags = circ.validate();
    if let Some(d) = diags.first() {
        return Err(SimError::InvalidCircuit(d.to_string()));
    }
    noise.validate()?;
    let n = circ.num_qubits();
    let locations: Vec<(usize, f64)> = circ
        .instructions
        .iter()
        .enumerate()
        .map(|(i, inst)| (i, noise.error_rate(inst)))
        .filter(|&(_, p)| p > 0.0)
        .collect();

    let engine: Box<dyn ShotEngine> = if n <= MAX_STATEVECTOR_QUBITS {
        Box::new(DenseEngine::new(circ)?)
    } else if n <= MAX_STABILIZER_QUBITS {
        Box::new(TableauEngine::new(circ).map_err(|e| match e {
            SimError::NonClifford { .. } => SimError::TooManyQubits {
                n,
                max: MAX_STATEVECTOR_QUBITS,
            },
            other => other,
        })?)
    } else {
        return Err(SimError::TooManyQubits {
            n,
            max: MAX_STABILIZER_QUBITS,
        });
    };

    const CHUNK: u64 = 1024;
    let chunks: Vec<u64> = (0..shots.div_ceil(CHUNK)).collect();
    let partials: Vec<(HashMap<Vec<bool>, u64>, SampleStats)> = chunks
        .par_iter()
        .map(|&c| {
            let mut hist: HashMap<Vec<bool>, u64> = HashMap::new();
            let mut stats = SampleStats::default();
            for shot in c * CHUNK..((c + 1) * CHUNK).min(shots) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(shot);
                let events = draw_events(circ, &locations, &mut rng);
                if !events.is_empty() {
                    stats.noisy_shots += 1;
                    stats.injected += events.len() as u64;
                }
                *hist.entry(engine.shot(&events, &mut rng)).or_insert(0) += 1;
            }
            (hist, stats)
        })
        .collect();

    let mut merged: BTreeMap<String, u64> = BTreeMap::new();
    let mut stats = SampleStats::default();
    for (hist, s) in partials {
        stats.noisy_shots += s.noisy_shots;
        stats.injected += s.injected;
        for (bits, v) in hist {
            *merged.entry(circ.counts_key(&bits)).or_insert(0) += v;
        }
    }
    Ok((
        Counts {
            shots,
            counts: merged,
        },
        stats,
    ))
}

/// A Pauli to apply right after instruction `after`.
struct Event {
    after: usize,
    pauli: PauliString,
}

const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn draw_events(circ: &Circuit, locations: &[(usize, f64)], rng: &mut ChaCha8Rng) -> Vec<Event> {
    let n = circ.num_qubits();
    let mut events = Vec::new();
    for &(index, p) in locations {
        if rng.gen::<f64>() >= p {
            continue;
        }
        let qubits = &circ.instructions[index].qubits;
        let choices = (1usize << (2 * qubits.len())) - 1;
        let mut code = rng.gen_range(1..=choices);
        let mut factors = Vec::with_capacity(qubits.len());
        for &q in qubits {
            factors.push((q, LETTERS[code & 3]));
            code >>= 2;
        }
        events.push(Event {
            after: index,
            pauli: PauliString::from_factors(n, &factors),
        });
    }
    events
}

trait ShotEngine: Sync {
    /// Runs one shot and returns its classical bits.
    fn shot(&self, events: &[Event], rng: &mut ChaCha8Rng) -> Vec<bool>;
}

const DETERMINISTIC_TOL: f64 = 1e-10;
const CHECKPOINT_BUDGET_BYTES: usize = 64 << 20;

struct Checkpoint {
    before: usize,
    state: StateVector,
    clbits: Vec<bool>,
}

struct DenseEngine<'a> {
    circ: &'a Circuit,
    is_terminal: Vec<bool>,
    terminal: Vec<(usize, usize)>,
    /// Length of the prefix whose noiseless evolution involves no randomness.
    det_prefix_len: usize,
    checkpoints: Vec<Checkpoint>,
    /// Cumulative final distribution when the whole circuit is deterministic.
    noiseless_cdf: Option<Vec<f64>>,
}

impl<'a> DenseEngine<'a> {
    fn new(circ: &'a Circuit) -> Result<Self, SimError> {
        let n = circ.num_qubits();
        let len = circ.instructions.len();
        let terminal_idx = circ.terminal_measurements();
        let mut is_terminal = vec![false; len];
        for &i in &terminal_idx {
            is_terminal[i] = true;
        }
        let terminal = terminal_idx
            .iter()
            .map(|&i| {
                (
                    circ.instructions[i].qubits[0],
                    circ.instructions[i].clbits[0],
                )
            })
            .collect();

        let state_bytes = 16usize << n;
        let max_checkpoints = (CHECKPOINT_BUDGET_BYTES / state_bytes).max(2);
        let stride = len.div_ceil(max_checkpoints - 1).max(1);
        let mut state = StateVector::zero(n)?;
        let mut clbits = vec![false; circ.num_clbits()];
        let mut checkpoints = Vec::new();
        let mut det_prefix_len = len;
        for (index, inst) in circ.instructions.iter().enumerate() {
            if index % stride == 0 {
                checkpoints.push(Checkpoint {
                    before: index,
                    state: state.clone(),
                    clbits: clbits.clone(),
                });
            }
            if is_terminal[index] {
                continue;
            }
            match inst.kind() {
                GateKind::Measure | GateKind::Reset => {
                    let q = inst.qubits[0];
                    let p1 = state.prob_one(q);
                    if p1 > DETERMINISTIC_TOL && p1 < 1.0 - DETERMINISTIC_TOL {
                        det_prefix_len = index;
                        break;
                    }
                    let outcome = p1 >= 0.5;
                    state.collapse(q, outcome);
                    if inst.kind() == GateKind::Measure {
                        clbits[inst.clbits[0]] = outcome;
                    } else if outcome {
                        state.flip(q);
                    }
                }
                _ => state.apply(inst)?,
            }
        }
        let noiseless_cdf = (det_prefix_len == len).then(|| cumulative(&state));
        if checkpoints
            .last()
            .is_none_or(|c| c.before != det_prefix_len)
        {
            checkpoints.push(Checkpoint {
                before: det_prefix_len,
                state,
                clbits,
            });
        }
        Ok(DenseEngine {
            circ,
            is_terminal,
            terminal,
            det_prefix_len,
            checkpoints,
            noiseless_cdf,
        })
    }

    fn finish(&self, mut clbits: Vec<bool>, basis: usize) -> Vec<bool> {
        for &(q, c) in &self.terminal {
            clbits[c] = (basis >> q) & 1 == 1;
        }
        clbits
    }
}

fn cumulative(state: &StateVector) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect()
}

fn draw_index(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cdf.last().unwrap_or(&1.0);
    let u = rng.gen::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

impl ShotEngine for DenseEngine<'_> {
    fn shot(&self, events: &[Event], rng: &mut ChaCha8Rng) -> Vec<bool> {
        let len = self.circ.instructions.len();
        let start = events
            .first()
            .map_or(len, |e| e.after + 1)
            .min(self.det_prefix_len);
        if start == len {
            if let Some(cdf) = &self.noiseless_cdf {
                let cp = self.checkpoints.last().expect("final checkpoint");
                return self.finish(cp.clbits.clone(), draw_index(cdf, rng));
            }
        }
        let cp_pos = self.checkpoints.partition_point(|c| c.before <= start) - 1;
        let cp = &self.checkpoints[cp_pos];
        let mut state = cp.state.clone();
        let mut clbits = cp.clbits.clone();
        let mut pending = events.iter().peekable();
        while let Some(e) = pending.next_if(|e| e.after < cp.before) {
            state.apply_pauli(&e.pauli);
        }
        for index in cp.before..len {
            let inst = &self.circ.instructions[index];
            if !self.is_terminal[index] {
                match inst.kind() {
                    GateKind::Measure | GateKind::Reset => {
                        let q = inst.qubits[0];
                        let p1 = state.prob_one(q);
                        let outcome = if index < start {
                            p1 >= 0.5
                        } else {
                            rng.gen::<f64>() < p1
                        };
                        state.collapse(q, outcome);
                        if inst.kind() == GateKind::Measure {
                            clbits[inst.clbits[0]] = outcome;
                        } else if outcome {
                            state.flip(q);
                        }
                    }
                    _ => state.apply(inst).expect("validated instruction"),
                }
            }
            while let Some(e) = pending.next_if(|e| e.after == index) {
                state.apply_pauli(&e.pauli);
            }
        }
        let cdf = cumulative(&state);
        self.finish(clbits, draw_index(&cdf, rng))
    }
}

struct TableauEngine<'a> {
    circ: &'a Circuit,
    programs: Vec<Vec<CliffordGate>>,
}

impl<'a> TableauEngine<'a> {
    fn new(circ: &'a Circuit) -> Result<Self, SimError> {
        Ok(TableauEngine {
            circ,
            programs: compile(circ)?,
        })
    }
}

impl ShotEngine for TableauEngine<'_> {
    fn shot(&self, events: &[Event], rng: &mut ChaCha8Rng) -> Vec<bool> {
        let mut state = StabilizerState::new(self.circ.num_qubits());
        let mut clbits = vec![false; self.circ.num_clbits()];
        let mut pending = events.iter().peekable();
        for (index, (inst, gates)) in self
            .circ
            .instructions
            .iter()
            .zip(&self.programs)
            .enumerate()
        {
            match inst.kind() {
                GateKind::Measure => {
                    clbits[inst.clbits[0]] = state.measure(inst.qubits[0], || rng.gen()).value;
                }
                GateKind::Reset => state.reset(inst.qubits[0], || rng.gen()),
                _ => gates.iter().for_each(|&g| state.apply(g)),
            }
            while let Some(e) = pending.next_if(|e| e.after == index) {
                state.apply_pauli(&e.pauli);
            }
        }
        clbits
    }
}
