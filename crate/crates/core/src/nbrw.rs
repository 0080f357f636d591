//! Non-backtracking random walk on the directed-edge state space.
//!
//! A walk step sits on a directed edge (x, y); the next state is (y, z) with z
//! a uniformly random neighbor of y other than x. Started at a vertex v, the
//! first edge is uniform over the d(v) edges out of v. The central quantity is
//! the return profile R[s]: the probability that the vertex reached after
//! exactly s edge traversals is the origin again. R[1] = 0 on simple graphs,
//! and R[s] = 0 for every s below the girth.

use rand::Rng;

use crate::graph::Graph;
use crate::{Error, Result};

/// Directed-edge view of a graph. Directed edge ids coincide with adjacency
/// slots: edge (x -> y) has id `offset(x) + rank of y among x's neighbors`,
/// so the tail array is implicit in the graph's CSR offsets.
pub struct DirectedEdgeSpace<'g> {
    g: &'g Graph,
    /// Start of each vertex's out-edge block; length n + 1.
    out_start: Vec<u32>,
    /// Head vertex of each directed edge.
    heads: Vec<u32>,
    /// Id of the reversed edge.
    rev: Vec<u32>,
}

impl<'g> DirectedEdgeSpace<'g> {
    /// Requires minimum degree 2: a non-backtracking step must always exist.
    pub fn build(g: &'g Graph) -> Result<Self> {
        if g.min_degree() < 2 {
            return Err(Error::OutOfModel(format!(
                "non-backtracking walk needs minimum degree >= 2, got {}",
                g.min_degree()
            )));
        }
        let n = g.n();
        let mut out_start = Vec::with_capacity(n + 1);
        out_start.push(0u32);
        for v in 0..n as u32 {
            out_start.push(out_start[v as usize] + g.degree(v) as u32);
        }
        let m2 = out_start[n] as usize;
        let mut heads = Vec::with_capacity(m2);
        for v in 0..n as u32 {
            heads.extend_from_slice(g.neighbors(v));
        }
        let mut rev = vec![0u32; m2];
        for x in 0..n as u32 {
            let base = out_start[x as usize];
            for (k, &y) in g.neighbors(x).iter().enumerate() {
                let e = base + k as u32;
                let rank = g.neighbors(y).binary_search(&x).expect("adjacency is symmetric") as u32;
                rev[e as usize] = out_start[y as usize] + rank;
            }
        }
        Ok(DirectedEdgeSpace { g, out_start, heads, rev })
    }

    pub fn edge_count(&self) -> usize {
        self.heads.len()
    }

    pub fn head(&self, e: u32) -> u32 {
        self.heads[e as usize]
    }

    pub fn reverse(&self, e: u32) -> u32 {
        self.rev[e as usize]
    }

    /// Directed out-edge ids of vertex v.
    pub fn out_edges(&self, v: u32) -> std::ops::Range<u32> {
        self.out_start[v as usize]..self.out_start[v as usize + 1]
    }

    /// One exact transition step: mass on (x, y) spreads equally over the
    /// deg(y) - 1 edges (y, z) with z != x.
    fn step(&self, cur: &[f64], next: &mut [f64]) {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (e, &mass) in cur.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let y = self.heads[e];
            let share = mass / (self.g.degree(y) as f64 - 1.0);
            let back = self.rev[e];
            for f in self.out_edges(y) {
                if f != back {
                    next[f as usize] += share;
                }
            }
        }
    }
}

/// Return probabilities R[1..=horizon] of a non-backtracking walk. `origin`
/// is `None` for a vertex-averaged profile.
#[derive(Debug, Clone)]
pub struct ReturnProfile {
    origin: Option<u32>,
    probs: Vec<f64>,
}

impl ReturnProfile {
    pub fn origin(&self) -> Option<u32> {
        self.origin
    }

    pub fn horizon(&self) -> usize {
        self.probs.len()
    }

    /// R[s] for 1 <= s <= horizon. Panics outside that range: callers are
    /// expected to have requested a sufficient horizon up front.
    pub fn at(&self, s: usize) -> f64 {
        assert!(s >= 1 && s <= self.probs.len(), "R[{s}] outside computed horizon {}", self.probs.len());
        self.probs[s - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.probs
    }
}

/// Exact return profile from vertex `v` up to `horizon` traversals, by dense
/// evolution of the edge-mass vector (O(horizon * sum_y deg(y)^2) time).
pub fn return_probabilities(g: &Graph, v: u32, horizon: usize) -> Result<ReturnProfile> {
    if v as usize >= g.n() {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let space = DirectedEdgeSpace::build(g)?;
    let probs = evolve_return_masses(g, &space, v, horizon);
    Ok(ReturnProfile { origin: Some(v), probs })
}

/// Return profile averaged over all origins. For generator families that are
/// vertex-transitive this equals any single-vertex profile and is computed as
/// one; otherwise every origin is evolved (n times the single-origin cost).
pub fn average_return_profile(g: &Graph, horizon: usize) -> Result<ReturnProfile> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    if g.is_transitive_family() {
        let p = return_probabilities(g, 0, horizon)?;
        return Ok(ReturnProfile { origin: None, probs: p.probs });
    }
    let space = DirectedEdgeSpace::build(g)?;
    let mut acc = vec![0.0; horizon];
    for v in 0..g.n() as u32 {
        let probs = evolve_return_masses(g, &space, v, horizon);
        for (a, p) in acc.iter_mut().zip(&probs) {
            *a += p;
        }
    }
    let n = g.n() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(ReturnProfile { origin: None, probs: acc })
}

fn evolve_return_masses(g: &Graph, space: &DirectedEdgeSpace, v: u32, horizon: usize) -> Vec<f64> {
    let m2 = space.edge_count();
    let mut cur = vec![0.0f64; m2];
    let mut next = vec![0.0f64; m2];
    let d = g.degree(v) as f64;
    for e in space.out_edges(v) {
        cur[e as usize] = 1.0 / d;
    }
    // Mass arriving back at v after s traversals sits on the reverses of v's
    // out-edges (all edges with head v).
    let in_edges: Vec<u32> = space.out_edges(v).map(|e| space.reverse(e)).collect();
    let mut probs = Vec::with_capacity(horizon);
    probs.push(in_edges.iter().map(|&e| cur[e as usize]).sum());
    for _ in 1..horizon {
        space.step(&cur, &mut next);
        std::mem::swap(&mut cur, &mut next);
        probs.push(in_edges.iter().map(|&e| cur[e as usize]).sum());
    }
    probs
}

/// Sample one non-backtracking walk of `steps` traversals from `v`; returns
/// the visited vertices, length `steps + 1`.
pub fn sample_nbrw(g: &Graph, v: u32, steps: usize, rng: &mut impl Rng) -> Result<Vec<u32>> {
    if v as usize >= g.n() {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    if g.min_degree() < 2 {
        return Err(Error::OutOfModel("non-backtracking walk needs minimum degree >= 2".into()));
    }
    let mut path = Vec::with_capacity(steps + 1);
    path.push(v);
    if steps == 0 {
        return Ok(path);
    }
    let nbs = g.neighbors(v);
    let mut prev = v;
    let mut cur = nbs[rng.random_range(0..nbs.len())];
    path.push(cur);
    for _ in 1..steps {
        let nbs = g.neighbors(cur);
        let k = rng.random_range(0..nbs.len() - 1);
        // Skip over the backtracking neighbor: nbs is sorted, prev appears once.
        let back = nbs.binary_search(&prev).expect("walk came from a neighbor");
        let choice = if k < back { nbs[k] } else { nbs[k + 1] };
        prev = cur;
        cur = choice;
        path.push(cur);
    }
    Ok(path)
}

/// Residual of the split-walk pairing identity on a regular graph: two
/// independent non-backtracking walks leave v along distinct starting edges
/// and run for t and t2 steps; the chance they meet at a common endpoint,
/// summed over ordered pairs of distinct starting edges, equals
/// d(d-1) R[t + t2 + 2]. Returns |LHS - RHS|; exact (up to rounding) on
/// vertex-transitive graphs.
pub fn loop_identity_residual(g: &Graph, v: u32, t: usize, t2: usize) -> Result<f64> {
    if v as usize >= g.n() {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    let d = g.require_regular(2)?;
    let space = DirectedEdgeSpace::build(g)?;
    let n = g.n();
    let m2 = space.edge_count();

    // Vertex-occupancy distributions after t and t2 chain steps from each
    // starting edge (v, v_i). The chain starts ON an edge, so "after t steps"
    // means t further traversals beyond the first.
    let tmax = t.max(t2);
    let mut at_t: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut at_t2: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut cur = vec![0.0f64; m2];
    let mut next = vec![0.0f64; m2];
    for e0 in space.out_edges(v) {
        cur.iter_mut().for_each(|x| *x = 0.0);
        cur[e0 as usize] = 1.0;
        let mut marg_t = None;
        let mut marg_t2 = None;
        if t == 0 {
            marg_t = Some(vertex_marginal(&space, &cur, n));
        }
        if t2 == 0 {
            marg_t2 = Some(vertex_marginal(&space, &cur, n));
        }
        for s in 1..=tmax {
            space.step(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
            if s == t {
                marg_t = Some(vertex_marginal(&space, &cur, n));
            }
            if s == t2 {
                marg_t2 = Some(vertex_marginal(&space, &cur, n));
            }
        }
        at_t.push(marg_t.expect("t <= tmax"));
        at_t2.push(marg_t2.expect("t2 <= tmax"));
    }

    // Sum over ordered pairs i != j of <a_i, b_j> via the totals trick.
    let mut total_t = vec![0.0f64; n];
    let mut total_t2 = vec![0.0f64; n];
    for i in 0..d {
        for y in 0..n {
            total_t[y] += at_t[i][y];
            total_t2[y] += at_t2[i][y];
        }
    }
    let mut lhs = 0.0;
    for y in 0..n {
        lhs += total_t[y] * total_t2[y];
    }
    for i in 0..d {
        for y in 0..n {
            lhs -= at_t[i][y] * at_t2[i][y];
        }
    }

    let profile = return_probabilities(g, v, t + t2 + 2)?;
    let rhs = (d as f64) * (d as f64 - 1.0) * profile.at(t + t2 + 2);
    Ok((lhs - rhs).abs())
}

fn vertex_marginal(space: &DirectedEdgeSpace, mass: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; n];
    for (e, &m) in mass.iter().enumerate() {
        if m != 0.0 {
            out[space.head(e as u32) as usize] += m;
        }
    }
    out
}

/// Default horizon cap used by the CLI when no explicit horizon is given:
/// enough for both condition statistics at criticality and a girth margin.
pub fn default_horizon(g: &Graph) -> usize {
    let cbrt = (g.n() as f64).cbrt().ceil() as usize;
    2 * cbrt + crate::graph::girth(g).unwrap_or(0)
}
