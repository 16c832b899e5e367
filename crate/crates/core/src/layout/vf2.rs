//! VF2-style subgraph monomorphism search and a greedy fallback placement.

use super::graph::{layout_score, CouplingGraph, Layout};
use crate::analysis::InteractionGraph;

/// Up to `limit` monomorphisms of `ig` into `cg`, in a deterministic order.
pub fn vf2_layouts(ig: &InteractionGraph, cg: &CouplingGraph, limit: usize) -> Vec<Layout> {
    let n = ig.num_nodes;
    if n > cg.num_qubits() || limit == 0 {
        return Vec::new();
    }
    let adj = ig.neighbors();
    let order = match_order(&adj);
    let mut by_degree: Vec<usize> = (0..cg.num_qubits()).collect();
    by_degree.sort_by_key(|&p| (std::cmp::Reverse(cg.degree(p)), p));

    let mut search = Search {
        adj: &adj,
        cg,
        order: &order,
        by_degree: &by_degree,
        map: vec![usize::MAX; n],
        used: vec![false; cg.num_qubits()],
        found: Vec::new(),
        limit,
    };
    search.extend(0);
    search
        .found
        .into_iter()
        .map(|map| Layout { map, score: 0 })
        .collect()
}

/// Next node: most already-ordered neighbours, then highest degree, then lowest index.
fn match_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let linked = adj[v].iter().filter(|&&u| placed[u]).count();
                (linked, adj[v].len(), std::cmp::Reverse(v))
            })
            .expect("unplaced node");
        placed[next] = true;
        order.push(next);
    }
    order
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    cg: &'a CouplingGraph,
    order: &'a [usize],
    by_degree: &'a [usize],
    map: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
    limit: usize,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            self.found.push(self.map.clone());
            return;
        }
        let v = self.order[depth];
        let anchor = self.adj[v]
            .iter()
            .copied()
            .find(|&u| self.map[u] != usize::MAX);
        let candidates: Vec<usize> = match anchor {
            Some(u) => {
                let mut c = self.cg.neighbors(self.map[u]).to_vec();
                c.sort_by_key(|&p| (std::cmp::Reverse(self.cg.degree(p)), p));
                c
            }
            None => self.by_degree.to_vec(),
        };
        for p in candidates {
            if self.used[p] || self.cg.degree(p) < self.adj[v].len() {
                continue;
            }
            let consistent = self.adj[v]
                .iter()
                .all(|&u| self.map[u] == usize::MAX || self.cg.has_edge(p, self.map[u]));
            if !consistent {
                continue;
            }
            self.map[v] = p;
            self.used[p] = true;
            self.extend(depth + 1);
            self.map[v] = usize::MAX;
            self.used[p] = false;
            if self.found.len() >= self.limit {
                return;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{needed} logical qubits do not fit on {available} physical qubits")]
pub struct InsufficientQubits {
    pub needed: usize,
    pub available: usize,
}

/// Greedy placement in descending interaction-degree order, each qubit onto
/// the free physical qubit with the smallest incremental score. Ties go to
/// the qubit closest to those already placed, then to the lowest index.
pub fn fallback_layout(
    ig: &InteractionGraph,
    cg: &CouplingGraph,
) -> Result<Layout, InsufficientQubits> {
    let n = ig.num_nodes;
    if n > cg.num_qubits() {
        return Err(InsufficientQubits {
            needed: n,
            available: cg.num_qubits(),
        });
    }
    let dist = cg.distance_matrix();
    let degrees = ig.degrees();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(degrees[v]), v));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; cg.num_qubits()];
    for &v in &order {
        let cost = |p: usize| -> (usize, usize, usize) {
            let inc = ig
                .edges
                .iter()
                .filter_map(|(&(a, b), &w)| {
                    let other = if a == v {
                        b
                    } else if b == v {
                        a
                    } else {
                        return None;
                    };
                    (map[other] != usize::MAX)
                        .then(|| w.saturating_mul(dist[p][map[other]].saturating_sub(1)))
                })
                .fold(0usize, usize::saturating_add);
            let proximity = map
                .iter()
                .filter(|&&m| m != usize::MAX)
                .map(|&m| dist[p][m])
                .fold(0usize, usize::saturating_add);
            (inc, proximity, p)
        };
        let p = (0..cg.num_qubits())
            .filter(|&p| !used[p])
            .min_by_key(|&p| cost(p))
            .expect("free qubit");
        map[v] = p;
        used[p] = true;
    }
    let score = layout_score(&map, ig, &dist);
    Ok(Layout { map, score })
}
