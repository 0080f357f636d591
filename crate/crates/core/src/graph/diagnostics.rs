//! Structural diagnostics: girth, bipartiteness, connectivity, and the
//! expansion quantity lambda* = largest |eigenvalue| of the simple-random-walk
//! transition matrix excluding the trivial eigenvalues +1 and (if bipartite) -1.

use std::collections::VecDeque;

use super::Graph;
use crate::{Error, Result};

#[derive(Debug, Clone, serde::Serialize)]
pub struct GraphDiagnostics {
    pub n: usize,
    pub edge_count: usize,
    /// None means acyclic (infinite girth).
    pub girth: Option<usize>,
    pub regular_degree: Option<usize>,
    pub bipartite: bool,
    pub connected: bool,
    /// None when the graph is disconnected (lambda* is not defined here).
    pub lambda_star: Option<f64>,
}

/// Girth (length of a shortest cycle), or `None` for forests.
///
/// One BFS per root: the first time a non-tree edge joins two already-seen
/// vertices at depths du, dw it witnesses a closed walk of length du + dw + 1
/// through the root. Minimized over all roots this is exactly the girth; a
/// root on a shortest cycle realizes it. Expansion stops once a level can no
/// longer improve the current best.
pub fn girth(g: &Graph) -> Option<usize> {
    let n = g.n();
    let mut best: usize = usize::MAX;
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut queue: VecDeque<u32> = VecDeque::new();

    for root in 0..n as u32 {
        if best == 3 {
            break;
        }
        for &t in &touched {
            dist[t as usize] = u32::MAX;
            parent[t as usize] = u32::MAX;
        }
        touched.clear();
        queue.clear();
        dist[root as usize] = 0;
        touched.push(root);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize] as usize;
            if 2 * du + 1 >= best {
                break;
            }
            for &w in g.neighbors(u) {
                if w == parent[u as usize] {
                    continue;
                }
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du as u32 + 1;
                    parent[w as usize] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else {
                    best = best.min(du + dist[w as usize] as usize + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

pub fn is_connected(g: &Graph) -> bool {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut stack = vec![0u32];
    seen[0] = true;
    let mut count = 1usize;
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == n
}

/// BFS 2-coloring; a graph with no edges counts as bipartite.
pub fn is_bipartite(g: &Graph) -> bool {
    let n = g.n();
    let mut color = vec![u8::MAX; n];
    let mut queue = VecDeque::new();
    for start in 0..n as u32 {
        if color[start as usize] != u8::MAX {
            continue;
        }
        color[start as usize] = 0;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if color[w as usize] == u8::MAX {
                    color[w as usize] = 1 - color[u as usize];
                    queue.push_back(w);
                } else if color[w as usize] == color[u as usize] {
                    return false;
                }
            }
        }
    }
    true
}

/// lambda* of the simple random walk: the largest absolute eigenvalue of
/// D^{-1} A after removing the eigenvalue 1 (constant direction) and, for
/// bipartite graphs, -1 (alternating direction). If nothing remains (K_1,
/// K_2) the convention is 0.
///
/// Power iteration on the square of the symmetrized operator with trivial
/// directions deflated at every step. Accuracy is governed by `tol` through
/// the Rayleigh-quotient stopping rule; clustered top eigenvalues slow the
/// iteration down but leave the returned value near the top of the cluster.
pub fn spectral_expansion(g: &Graph, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if !is_connected(g) {
        return Err(Error::InvalidStructure("lambda* requires a connected graph".into()));
    }
    let n = g.n();
    let bipartite = is_bipartite(g);
    let trivial_dims = 1 + bipartite as usize;
    if n <= trivial_dims {
        return Ok(0.0);
    }

    // Symmetrized operator S = D^{-1/2} A D^{-1/2}; same spectrum as D^{-1} A.
    let sqrt_deg: Vec<f64> = (0..n as u32).map(|v| (g.degree(v) as f64).sqrt()).collect();
    if sqrt_deg.iter().any(|&s| s == 0.0) {
        return Err(Error::InvalidStructure("isolated vertex in a connected graph of size > 1".into()));
    }

    // Trivial eigenvectors of S, normalized.
    let mut phi0 = sqrt_deg.clone();
    normalize(&mut phi0);
    let phi1 = bipartite.then(|| {
        let side = bipartition_sides(g);
        let mut v: Vec<f64> = (0..n).map(|i| if side[i] { sqrt_deg[i] } else { -sqrt_deg[i] }).collect();
        normalize(&mut v);
        v
    });

    let apply = |x: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for v in 0..n as u32 {
            let xv = x[v as usize] / sqrt_deg[v as usize];
            for &w in g.neighbors(v) {
                out[w as usize] += xv / sqrt_deg[w as usize];
            }
        }
    };
    let deflate = |x: &mut [f64]| {
        let c0 = dot(x, &phi0);
        for i in 0..n {
            x[i] -= c0 * phi0[i];
        }
        if let Some(p1) = &phi1 {
            let c1 = dot(x, p1);
            for i in 0..n {
                x[i] -= c1 * p1[i];
            }
        }
    };

    // Deterministic pseudo-random start vector.
    let mut x: Vec<f64> = (0..n as u64)
        .map(|i| {
            let h = crate::harness::derive_seed(0x5eed_1ab5, &[i]);
            (h as f64 / u64::MAX as f64) - 0.5
        })
        .collect();
    deflate(&mut x);
    normalize(&mut x);

    let mut tmp = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut stable = 0u32;
    let max_iters = 200_000usize;
    let mut lambda_sq: f64 = 0.0;
    for _ in 0..max_iters {
        // One application of S^2, re-deflated to stop drift back into the
        // trivial directions.
        apply(&x, &mut tmp);
        apply(&tmp, &mut y);
        deflate(&mut y);
        lambda_sq = dot(&x, &y);
        let norm = normalize(&mut y);
        if norm < 1e-300 {
            return Ok(0.0);
        }
        std::mem::swap(&mut x, &mut y);
        if (lambda_sq - prev).abs() <= (tol * tol).max(1e-15) {
            stable += 1;
            if stable >= 10 {
                break;
            }
        } else {
            stable = 0;
        }
        prev = lambda_sq;
    }
    Ok(lambda_sq.max(0.0).sqrt())
}

fn bipartition_sides(g: &Graph) -> Vec<bool> {
    let n = g.n();
    let mut side = vec![false; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[0] = true;
    side[0] = true;
    queue.push_back(0u32);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                side[w as usize] = !side[u as usize];
                queue.push_back(w);
            }
        }
    }
    side
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// All diagnostics in one pass; `lambda_star` is skipped for disconnected graphs.
pub fn diagnostics(g: &Graph, tol: f64) -> Result<GraphDiagnostics> {
    let connected = is_connected(g);
    Ok(GraphDiagnostics {
        n: g.n(),
        edge_count: g.edge_count(),
        girth: girth(g),
        regular_degree: g.regular_degree(),
        bipartite: is_bipartite(g),
        connected,
        lambda_star: if connected { Some(spectral_expansion(g, tol)?) } else { None },
    })
}
