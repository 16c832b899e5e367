use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::analysis::InteractionGraph;

/// Undirected hardware connectivity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct CouplingGraph {
    num_qubits: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    num_qubits: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawGraph> for CouplingGraph {
    type Error = GraphError;

    fn try_from(raw: RawGraph) -> Result<Self, GraphError> {
        CouplingGraph::new(raw.num_qubits, raw.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<CouplingGraph> for RawGraph {
    fn from(g: CouplingGraph) -> Self {
        RawGraph {
            num_qubits: g.num_qubits,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    Duplicate(usize, usize),
    #[error("edge ({0}, {1}) exceeds node count {2}")]
    OutOfRange(usize, usize, usize),
    #[error("unknown builtin coupling graph '{0}'")]
    UnknownBuiltin(String),
}

impl CouplingGraph {
    pub fn new(
        num_qubits: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        let mut adj = vec![Vec::new(); num_qubits];
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if a >= num_qubits || b >= num_qubits {
                return Err(GraphError::OutOfRange(a, b, num_qubits));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(GraphError::Duplicate(a, b));
            }
            list.push((a, b));
            adj[a].push(b);
            adj[b].push(a);
        }
        for n in &mut adj {
            n.sort_unstable();
        }
        Ok(CouplingGraph {
            num_qubits,
            edges: list,
            adj,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adj[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adj[q].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Hop distances from `src`; `usize::MAX` marks unreachable nodes.
    pub fn bfs(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_qubits];
        let mut queue = VecDeque::from([src]);
        dist[src] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.num_qubits).map(|q| self.bfs(q)).collect()
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("path graph")
    }

    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let q = r * cols + c;
                if c + 1 < cols {
                    edges.push((q, q + 1));
                }
                if r + 1 < rows {
                    edges.push((q, q + cols));
                }
            }
        }
        Self::new(rows * cols, edges).expect("grid graph")
    }

    pub fn all_to_all(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).expect("complete graph")
    }

    /// The 127-qubit heavy-hex lattice: seven rows of qubits joined by
    /// degree-2 connector qubits.
    pub fn heavy_hex_127() -> Self {
        let rows: [(usize, usize); 7] = [
            (0, 13),
            (18, 32),
            (37, 51),
            (56, 70),
            (75, 89),
            (94, 108),
            (113, 126),
        ];
        let mut edges = Vec::new();
        for (lo, hi) in rows {
            edges.extend((lo..hi).map(|q| (q, q + 1)));
        }
        // (upper row qubit, connector, lower row qubit)
        let connectors: [(usize, usize, usize); 24] = [
            (0, 14, 18),
            (4, 15, 22),
            (8, 16, 26),
            (12, 17, 30),
            (20, 33, 39),
            (24, 34, 43),
            (28, 35, 47),
            (32, 36, 51),
            (37, 52, 56),
            (41, 53, 60),
            (45, 54, 64),
            (49, 55, 68),
            (58, 71, 77),
            (62, 72, 81),
            (66, 73, 85),
            (70, 74, 89),
            (75, 90, 94),
            (79, 91, 98),
            (83, 92, 102),
            (87, 93, 106),
            (96, 109, 114),
            (100, 110, 118),
            (104, 111, 122),
            (108, 112, 126),
        ];
        for (a, c, b) in connectors {
            edges.push((a, c));
            edges.push((c, b));
        }
        Self::new(127, edges).expect("heavy-hex graph")
    }

    /// Named graphs: `heavy-hex-127`, `all-to-all` (sized to `min_qubits`),
    /// `path-N` and `grid-RxC`.
    pub fn builtin(name: &str, min_qubits: usize) -> Result<Self, GraphError> {
        let unknown = || GraphError::UnknownBuiltin(name.to_string());
        match name {
            "heavy-hex-127" => Ok(Self::heavy_hex_127()),
            "all-to-all" => Ok(Self::all_to_all(min_qubits)),
            _ => {
                if let Some(n) = name.strip_prefix("path-") {
                    return Ok(Self::path(n.parse().map_err(|_| unknown())?));
                }
                if let Some(dims) = name.strip_prefix("grid-") {
                    let (r, c) = dims.split_once('x').ok_or_else(unknown)?;
                    return Ok(Self::grid(
                        r.parse().map_err(|_| unknown())?,
                        c.parse().map_err(|_| unknown())?,
                    ));
                }
                Err(unknown())
            }
        }
    }
}

/// Injective logical → physical assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub map: Vec<usize>,
    pub score: usize,
}

impl Layout {
    pub fn new(map: Vec<usize>, ig: &InteractionGraph, dist: &[Vec<usize>]) -> Self {
        let score = layout_score(&map, ig, dist);
        Layout { map, score }
    }

    pub fn is_injective(&self) -> bool {
        let set: BTreeSet<usize> = self.map.iter().copied().collect();
        set.len() == self.map.len()
    }
}

/// Sum of `weight · (distance − 1)` over interaction edges; unreachable pairs
/// saturate.
pub fn layout_score(map: &[usize], ig: &InteractionGraph, dist: &[Vec<usize>]) -> usize {
    ig.edges
        .iter()
        .map(|(&(a, b), &w)| w.saturating_mul(dist[map[a]][map[b]].saturating_sub(1)))
        .fold(0usize, usize::saturating_add)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heavy_hex_shape() {
        let g = CouplingGraph::heavy_hex_127();
        assert_eq!(g.num_qubits(), 127);
        assert_eq!(g.edges().len(), 144);
        assert!((0..127).all(|q| (1..=3).contains(&g.degree(q))));
        assert!(g.bfs(0).iter().all(|&d| d != usize::MAX));
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(
            CouplingGraph::new(2, [(0, 0)]),
            Err(GraphError::SelfLoop(0))
        );
        assert_eq!(
            CouplingGraph::new(2, [(0, 1), (1, 0)]),
            Err(GraphError::Duplicate(1, 0))
        );
        assert!(matches!(
            CouplingGraph::new(2, [(0, 2)]),
            Err(GraphError::OutOfRange(..))
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = CouplingGraph::grid(2, 3);
        let text = serde_json::to_string(&g).unwrap();
        assert!(text.starts_with("{\"num_qubits\":6,\"edges\":[[0,1]"));
        assert_eq!(serde_json::from_str::<CouplingGraph>(&text).unwrap(), g);
    }

    #[test]
    fn triangle_on_path_scores_one() {
        let mut ig = InteractionGraph::new(3);
        ig.add_edge(0, 1, 1);
        ig.add_edge(1, 2, 1);
        ig.add_edge(0, 2, 1);
        let dist = CouplingGraph::path(3).distance_matrix();
        let best = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ]
        .iter()
        .map(|m| layout_score(m, &ig, &dist))
        .min();
        assert_eq!(best, Some(1));
    }
}
