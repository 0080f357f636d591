//! Simple undirected graphs in CSR form, the generator families used by the
//! experiments, and structural diagnostics (girth, bipartiteness, spectral
//! expansion of the simple random walk).

mod diagnostics;
mod generators;
mod io;

pub use diagnostics::{diagnostics, girth, is_bipartite, is_connected, spectral_expansion, GraphDiagnostics};
pub use generators::{
    complete_graph, cycle_graph, hamming_graph, lps_ramanujan_graph, petersen_graph,
    random_regular_graph, random_regular_graph_with_attempts,
};
pub use io::{read_edge_list, write_edge_list};

pub(crate) use generators::MAX_MATERIALIZED_EDGES;

use crate::{Error, Result};

/// Which generator produced a graph. `Complete`, `Hamming` and `Lps` are
/// vertex-transitive by construction, which some statistics exploit (a single
/// return profile stands in for the vertex average).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Complete,
    Hamming,
    Lps,
    RandomRegular,
    Custom,
}

impl FamilyTag {
    /// True for families whose members are vertex-transitive by construction.
    pub fn is_transitive(self) -> bool {
        matches!(self, FamilyTag::Complete | FamilyTag::Hamming | FamilyTag::Lps)
    }
}

/// Immutable simple undirected graph. Neighbor lists are sorted; every
/// undirected edge has a stable id (its rank in the lexicographically sorted
/// `(u, v)` list with `u < v`), used by percolation masks and coin ledgers.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
    /// Undirected edge id for each adjacency slot (parallel to `neighbors`).
    edge_ids: Vec<u32>,
    edges: Vec<(u32, u32)>,
    family: FamilyTag,
}

impl Graph {
    /// Build from an edge list. Endpoints may come in either order; loops,
    /// duplicate edges and out-of-range endpoints are rejected.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
        family: FamilyTag,
    ) -> Result<Graph> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph must have at least one vertex".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::CapacityExceeded(format!("{n} vertices exceed u32 vertex ids")));
        }
        let mut list: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidStructure(format!("loop at vertex {a}")));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if list.windows(2).any(|w| w[0] == w[1]) {
            let d = list.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
            return Err(Error::InvalidStructure(format!("duplicate edge ({}, {})", d.0, d.1)));
        }

        let mut degree = vec![0u32; n];
        for &(u, v) in &list {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut cursor: Vec<u32> = offsets[..n].to_vec();
        let mut neighbors = vec![0u32; 2 * list.len()];
        let mut edge_ids = vec![0u32; 2 * list.len()];
        for (id, &(u, v)) in list.iter().enumerate() {
            let cu = cursor[u as usize] as usize;
            neighbors[cu] = v;
            edge_ids[cu] = id as u32;
            cursor[u as usize] += 1;
            let cv = cursor[v as usize] as usize;
            neighbors[cv] = u;
            edge_ids[cv] = id as u32;
            cursor[v as usize] += 1;
        }
        // Sort each adjacency slot by neighbor id, keeping edge ids aligned.
        for v in 0..n {
            let lo = offsets[v] as usize;
            let hi = offsets[v + 1] as usize;
            let mut slot: Vec<(u32, u32)> = neighbors[lo..hi]
                .iter()
                .copied()
                .zip(edge_ids[lo..hi].iter().copied())
                .collect();
            slot.sort_unstable();
            for (k, (nb, id)) in slot.into_iter().enumerate() {
                neighbors[lo + k] = nb;
                edge_ids[lo + k] = id;
            }
        }
        Ok(Graph { n, offsets, neighbors, edge_ids, edges: list, family })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn degree(&self, v: u32) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.neighbors[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    /// Undirected edge ids parallel to `neighbors(v)`.
    pub fn neighbor_edge_ids(&self, v: u32) -> &[u32] {
        &self.edge_ids[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    /// All edges as `(u, v)` with `u < v`, sorted lexicographically; the index
    /// in this slice is the edge id.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn endpoints(&self, edge_id: u32) -> (u32, u32) {
        self.edges[edge_id as usize]
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (0..self.n as u32).all(|v| self.degree(v) == d).then_some(d)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n as u32).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Vertex-transitivity as promised by the generator family. Only a hint:
    /// `Custom` graphs may well be transitive (e.g. Petersen) but are not tagged.
    pub fn is_transitive_family(&self) -> bool {
        self.family.is_transitive()
    }

    /// Require a regular graph of degree >= `min_d`, returning the degree.
    pub(crate) fn require_regular(&self, min_d: usize) -> Result<usize> {
        let d = self
            .regular_degree()
            .ok_or_else(|| Error::InvalidStructure("graph is not regular".into()))?;
        if d < min_d {
            return Err(Error::OutOfModel(format!("degree {d} below required minimum {min_d}")));
        }
        Ok(d)
    }
}
