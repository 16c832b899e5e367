//! File-based pipeline stages behind the `qedc` subcommands.
//!
//! Every stage is a pure function of its inputs. The `read_*` helpers do the
//! file handling, and every failure maps to a [`DriverError`] with a stable
//! exit code.

use std::collections::BTreeSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    find_clifford_regions, interaction_graph, select_code, Code, CodeChoice, Region,
    SelectionConfig,
};
use crate::circuit::{emit_qasm, parse_qasm, Circuit, GateKind, ParseError};
use crate::iceberg::{build_iceberg_circuit, IcebergError};
use crate::layout::{
    fallback_layout, route, schedule, vf2_layouts, CouplingGraph, GraphError, RouteError,
};
use crate::meta::{CodeMeta, CompilationMeta, TOOL_VERSION};
use crate::pcs::{convert_to_pcs_largest_clifford, PcsError, Strategy};
use crate::postprocess::{
    estimate_overhead, extrapolate_checks, postselect_counts, postselect_counts_iceberg,
    DetectionRule, ExtrapolationError, ExtrapolationResult, OverheadEstimate, PostselectError,
    PostselectionReport, SeriesPoint,
};
use crate::sim::{sample, Counts, NoiseModel, SimError};

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("no protectable region: {0}")]
    NoProtectableRegion(String),
    #[error("{0}")]
    OddQubitCount(String),
    #[error("layout infeasible: {0}")]
    LayoutInfeasible(String),
    #[error("size limit: {0}")]
    SizeLimit(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("metadata mismatch: {0}")]
    MetaMismatch(String),
    #[error("unsupported gate: {0}")]
    Unsupported(String),
    #[error("extrapolation failed: {0}")]
    Extrapolation(#[from] ExtrapolationError),
}

impl DriverError {
    pub fn exit_code(&self) -> i32 {
        match self {
            DriverError::Io { .. } => 1,
            DriverError::Parse(_) => 2,
            DriverError::NoProtectableRegion(_) => 3,
            DriverError::OddQubitCount(_) => 4,
            DriverError::LayoutInfeasible(_) => 5,
            DriverError::SizeLimit(_) => 6,
            DriverError::Malformed(_) => 7,
            DriverError::MetaMismatch(_) => 8,
            DriverError::Unsupported(_) => 9,
            DriverError::Extrapolation(_) => 10,
        }
    }

    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            DriverError::Io { .. } => "io",
            DriverError::Parse(_) => "parse",
            DriverError::NoProtectableRegion(_) => "no-protectable-region",
            DriverError::OddQubitCount(_) => "odd-qubit-count",
            DriverError::LayoutInfeasible(_) => "layout-infeasible",
            DriverError::SizeLimit(_) => "size-limit",
            DriverError::Malformed(_) => "malformed-input",
            DriverError::MetaMismatch(_) => "meta-mismatch",
            DriverError::Unsupported(_) => "unsupported-gate",
            DriverError::Extrapolation(_) => "extrapolation",
        }
    }

    /// `{"error": code, "message": …}` as printed on standard error.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.code(), "message": self.to_string() })
    }
}

impl From<PcsError> for DriverError {
    fn from(e: PcsError) -> Self {
        match e {
            PcsError::NoRegion(_) | PcsError::EmptyPayload => {
                DriverError::NoProtectableRegion(e.to_string())
            }
            other => DriverError::Malformed(other.to_string()),
        }
    }
}

impl From<IcebergError> for DriverError {
    fn from(e: IcebergError) -> Self {
        match e {
            IcebergError::OddQubitCount(_) => DriverError::OddQubitCount(e.to_string()),
            IcebergError::Unsupported(_) | IcebergError::UnsupportedLogical(_) => {
                DriverError::Unsupported(e.to_string())
            }
            IcebergError::LengthMismatch { .. } => DriverError::MetaMismatch(e.to_string()),
        }
    }
}

impl From<SimError> for DriverError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::TooManyQubits { .. } => DriverError::SizeLimit(e.to_string()),
            SimError::NonClifford { .. } | SimError::MidCircuitMeasurement { .. } => {
                DriverError::Unsupported(e.to_string())
            }
            SimError::InvalidCircuit(_) | SimError::InvalidNoise(_) => {
                DriverError::Malformed(e.to_string())
            }
        }
    }
}

impl From<PostselectError> for DriverError {
    fn from(e: PostselectError) -> Self {
        match e {
            PostselectError::ShotMismatch { .. } => DriverError::Malformed(e.to_string()),
            other => DriverError::MetaMismatch(other.to_string()),
        }
    }
}

fn io_error(path: &Path, source: std::io::Error) -> DriverError {
    DriverError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn read_text(path: &Path) -> Result<String, DriverError> {
    std::fs::read_to_string(path).map_err(|e| io_error(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), DriverError> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

pub fn read_circuit(path: &Path) -> Result<Circuit, DriverError> {
    Ok(parse_qasm(&read_text(path)?)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, DriverError> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| DriverError::Malformed(format!("{}: {e}", path.display())))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionSummary {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub max_degree: usize,
    /// `[a, b, two-qubit gate count]`.
    pub edges: Vec<[usize; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub num_qubits: usize,
    pub gate_count: usize,
    pub two_qubit_count: usize,
    pub regions: Vec<Region>,
    pub interaction_graph: InteractionSummary,
    pub code_choice: CodeChoice,
}

pub fn analyze(circ: &Circuit, cfg: &SelectionConfig) -> AnalysisReport {
    let ig = interaction_graph(circ);
    let summary = InteractionSummary {
        num_nodes: ig.num_nodes,
        num_edges: ig.edges.len(),
        max_degree: ig.degrees().into_iter().max().unwrap_or(0),
        edges: ig.edges.iter().map(|(&(a, b), &w)| [a, b, w]).collect(),
    };
    AnalysisReport {
        num_qubits: circ.num_qubits(),
        gate_count: circ.gate_count(),
        two_qubit_count: circ.two_qubit_count(),
        regions: find_clifford_regions(circ),
        interaction_graph: summary,
        code_choice: select_code(circ, cfg),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeRequest {
    Auto,
    Pcs,
    Iceberg,
    None,
}

/// A coupling graph given by file contents or by builtin name. Builtins that
/// scale (`all-to-all`) are sized once the encoded qubit count is known.
#[derive(Clone, Debug, PartialEq)]
pub enum CouplingSpec {
    Graph(CouplingGraph),
    Builtin(String),
}

impl CouplingSpec {
    /// A path to an existing file is read as coupling JSON; anything else is a builtin name.
    pub fn resolve(arg: &str) -> Result<Self, DriverError> {
        let path = Path::new(arg);
        if path.is_file() {
            Ok(CouplingSpec::Graph(read_json(path)?))
        } else {
            CouplingGraph::builtin(arg, 1).map_err(|e| DriverError::Malformed(e.to_string()))?;
            Ok(CouplingSpec::Builtin(arg.to_string()))
        }
    }

    fn graph(&self, min_qubits: usize) -> Result<CouplingGraph, GraphError> {
        match self {
            CouplingSpec::Graph(g) => Ok(g.clone()),
            CouplingSpec::Builtin(name) => CouplingGraph::builtin(name, min_qubits),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompileOptions {
    pub code: CodeRequest,
    /// Check count for PCS, syndrome cycle count for Iceberg.
    pub checks: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub coupling: CouplingSpec,
    pub selection: SelectionConfig,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            code: CodeRequest::Auto,
            checks: 2,
            strategy: Strategy::GreedyCoverage,
            seed: 0,
            coupling: CouplingSpec::Builtin("all-to-all".into()),
            selection: SelectionConfig::default(),
        }
    }
}

fn has_measurement(circ: &Circuit) -> bool {
    circ.instructions
        .iter()
        .any(|i| i.kind() == GateKind::Measure)
}

/// Inserts the detection code, then lays out, routes and schedules.
pub fn compile(
    circ: &Circuit,
    opts: &CompileOptions,
) -> Result<(Circuit, CompilationMeta), DriverError> {
    let code = match opts.code {
        CodeRequest::Auto => select_code(circ, &opts.selection).code,
        CodeRequest::Pcs => Code::Pcs,
        CodeRequest::Iceberg => Code::Iceberg,
        CodeRequest::None => Code::None,
    };
    let mut measured = circ.clone();
    if !has_measurement(&measured) && measured.num_qubits() > 0 {
        measured.measure_all();
    }
    let (encoded, code_meta, protected): (Circuit, CodeMeta, BTreeSet<usize>) = match code {
        Code::Pcs => {
            if opts.checks == 0 {
                return Err(DriverError::Malformed(
                    "PCS needs at least one check".into(),
                ));
            }
            let (c, m) =
                convert_to_pcs_largest_clifford(&measured, opts.checks, opts.strategy, opts.seed)?;
            let protected = m.ancilla_qubits().into_iter().collect();
            (c, CodeMeta::Pcs(m), protected)
        }
        Code::Iceberg => {
            let (c, m) = build_iceberg_circuit(circ, opts.checks)?;
            let protected = m.ancillas.iter().copied().collect();
            (c, CodeMeta::Iceberg(m), protected)
        }
        Code::None => {
            let cregs = measured.cregs.clone();
            (measured, CodeMeta::None { cregs }, BTreeSet::new())
        }
    };

    let n = encoded.num_qubits();
    let cg = opts
        .coupling
        .graph(n)
        .map_err(|e| DriverError::Malformed(e.to_string()))?;
    if cg.num_qubits() < n {
        return Err(DriverError::LayoutInfeasible(format!(
            "circuit needs {n} qubits but the coupling graph has {}",
            cg.num_qubits()
        )));
    }
    let ig = interaction_graph(&encoded);
    let layout = match vf2_layouts(&ig, &cg, 1).into_iter().next() {
        Some(l) => l,
        None => {
            fallback_layout(&ig, &cg).map_err(|e| DriverError::LayoutInfeasible(e.to_string()))?
        }
    };
    let mut routed = route(&encoded, &layout, &cg, &protected).map_err(|e| match e {
        RouteError::Disconnected(..) => DriverError::LayoutInfeasible(e.to_string()),
        other => DriverError::Malformed(other.to_string()),
    })?;
    let physical_qubits = routed.compact();
    let sched = schedule(&routed.circuit);
    let meta = CompilationMeta {
        tool_version: TOOL_VERSION.to_string(),
        code: code_meta,
        layout,
        physical_qubits,
        final_map: routed.final_map.clone(),
        swaps: routed.swaps,
        depth: sched.depth,
        num_qubits: routed.circuit.num_qubits(),
        num_clbits: routed.circuit.num_clbits(),
    };
    Ok((routed.circuit, meta))
}

pub fn run(
    circ: &Circuit,
    noise: &NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Counts, DriverError> {
    Ok(sample(circ, noise, shots, seed)?)
}

/// Dispatches on the metadata's code.
pub fn postselect(
    counts: &Counts,
    meta: &CompilationMeta,
) -> Result<PostselectionReport, DriverError> {
    let check_keys = |cregs: &[crate::circuit::Register]| -> Result<(), DriverError> {
        for key in counts.counts.keys() {
            if crate::circuit::parse_counts_key(cregs, key).is_none() {
                return Err(DriverError::MetaMismatch(format!(
                    "key '{key}' does not match the metadata registers"
                )));
            }
        }
        Ok(())
    };
    match &meta.code {
        CodeMeta::Pcs(m) => Ok(postselect_counts(counts, m)?),
        CodeMeta::Iceberg(m) => Ok(postselect_counts_iceberg(counts, m)?),
        CodeMeta::None { cregs } => {
            check_keys(cregs)?;
            let held: u64 = counts.counts.values().sum();
            if held != counts.shots {
                return Err(DriverError::Malformed(format!(
                    "counts declare {} shots but hold {held}",
                    counts.shots
                )));
            }
            Ok(PostselectionReport {
                kept: counts.shots,
                total: counts.shots,
                keep_rate: if counts.shots == 0 { 0.0 } else { 1.0 },
                counts: counts.counts.clone(),
            })
        }
    }
}

/// First-order keep-rate prediction for a compiled circuit.
pub fn estimate_keep_rate(
    circ: &Circuit,
    meta: &CompilationMeta,
    noise: &NoiseModel,
) -> Result<OverheadEstimate, DriverError> {
    meta.check_circuit(circ)
        .map_err(|e| DriverError::MetaMismatch(e.to_string()))?;
    noise.validate()?;
    let (rule, exact) = match &meta.code {
        CodeMeta::Pcs(m) => (DetectionRule::for_pcs(m), false),
        CodeMeta::Iceberg(m) => (DetectionRule::for_iceberg(m), true),
        CodeMeta::None { .. } => (DetectionRule::AnyFlip { bits: Vec::new() }, true),
    };
    Ok(estimate_overhead(circ, &rule, noise, exact))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostselectOutput {
    #[serde(flatten)]
    pub report: PostselectionReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub predicted: Option<OverheadEstimate>,
}

pub fn extrapolate(series: &[SeriesPoint]) -> Result<ExtrapolationResult, DriverError> {
    Ok(extrapolate_checks(series)?)
}

pub fn compile_to_text(
    circ: &Circuit,
    opts: &CompileOptions,
) -> Result<(String, String), DriverError> {
    let (out, meta) = compile(circ, opts)?;
    Ok((emit_qasm(&out), to_json_text(&meta)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qaoa_ring(n: usize) -> Circuit {
        let mut c = Circuit::new(n, 0);
        for q in 0..n {
            c.h(q);
        }
        for q in 0..n {
            c.rzz(0.7, q, (q + 1) % n);
        }
        for q in 0..n {
            c.rx(0.4, q);
        }
        c
    }

    #[test]
    fn t_only_has_no_region() {
        let mut c = Circuit::new(1, 0);
        c.t(0);
        let opts = CompileOptions {
            code: CodeRequest::Pcs,
            ..Default::default()
        };
        let err = compile(&c, &opts).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("no protectable region"));
    }

    #[test]
    fn odd_iceberg_rejected() {
        let opts = CompileOptions {
            code: CodeRequest::Iceberg,
            ..Default::default()
        };
        assert_eq!(compile(&qaoa_ring(3), &opts).unwrap_err().exit_code(), 4);
    }

    #[test]
    fn iceberg_on_all_to_all() {
        let opts = CompileOptions {
            code: CodeRequest::Iceberg,
            ..Default::default()
        };
        let (c, meta) = compile(&qaoa_ring(6), &opts).unwrap();
        assert_eq!(c.num_qubits(), 10);
        assert_eq!(meta.swaps, 0);
        let CodeMeta::Iceberg(m) = &meta.code else {
            panic!("expected iceberg")
        };
        assert_eq!((m.data_qubits.len(), m.ancillas.len()), (8, 2));
    }

    #[test]
    fn small_coupling_is_infeasible() {
        let opts = CompileOptions {
            code: CodeRequest::Iceberg,
            coupling: CouplingSpec::Builtin("path-4".into()),
            ..Default::default()
        };
        assert_eq!(compile(&qaoa_ring(6), &opts).unwrap_err().exit_code(), 5);
    }

    #[test]
    fn error_json_shape() {
        let e = DriverError::SizeLimit("too big".into());
        assert_eq!(
            e.to_json(),
            serde_json::json!({"error": "size-limit", "message": "size limit: too big"})
        );
    }
}
