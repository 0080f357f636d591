//! Bond percolation machinery: edge masks, lazily-revealed coin ledgers,
//! component statistics, avoided-set balls, the multi-root exploration
//! process, and geometry observables (diameter, lazy-walk mixing time) of a
//! percolated component.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::graph::{Graph, MAX_MATERIALIZED_EDGES};
use crate::harness::derive_seed;
use crate::{Error, Result};

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Open/closed status of every edge of a graph, sampled in one pass.
/// Masks drawn with the same seed are monotone-coupled across p: each edge
/// keeps its uniform, so raising p only opens more edges.
#[derive(Debug, Clone)]
pub struct EdgeMask {
    p: f64,
    seed: u64,
    bits: Vec<u64>,
    edge_count: usize,
    open_count: usize,
}

impl EdgeMask {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn open_count(&self) -> usize {
        self.open_count
    }

    pub fn is_open(&self, edge_id: u32) -> bool {
        let e = edge_id as usize;
        assert!(e < self.edge_count, "edge id {e} out of range");
        self.bits[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn open_edge_ids(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.edge_count as u32).filter(|&e| self.is_open(e))
    }
}

pub fn sample_percolation(g: &Graph, p: f64, seed: u64) -> Result<EdgeMask> {
    check_prob(p)?;
    let m = g.edge_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = vec![0u64; m.div_ceil(64)];
    let mut open_count = 0usize;
    for e in 0..m {
        if rng.random::<f64>() < p {
            bits[e / 64] |= 1 << (e % 64);
            open_count += 1;
        }
    }
    Ok(EdgeMask { p, seed, bits, edge_count: m, open_count })
}

struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Component sizes of a percolated graph, largest first.
#[derive(Debug, Clone)]
pub struct ComponentStats {
    pub sizes: Vec<usize>,
}

impl ComponentStats {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    pub fn second_largest(&self) -> usize {
        self.sizes.get(1).copied().unwrap_or(0)
    }
}

pub fn component_stats(g: &Graph, mask: &EdgeMask) -> ComponentStats {
    let mut dsu = DisjointSets::new(g.n());
    for e in mask.open_edge_ids() {
        let (u, v) = g.endpoints(e);
        dsu.union(u, v);
    }
    stats_from_dsu(g.n(), &mut dsu)
}

/// Component sizes of the graph on {0, .., n-1} with the given open edges;
/// the graph itself never needs to be materialized.
pub fn components_from_edge_list(n: usize, open_edges: &[(u32, u32)]) -> ComponentStats {
    let mut dsu = DisjointSets::new(n);
    for &(u, v) in open_edges {
        dsu.union(u, v);
    }
    stats_from_dsu(n, &mut dsu)
}

fn stats_from_dsu(n: usize, dsu: &mut DisjointSets) -> ComponentStats {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for v in 0..n as u32 {
        *counts.entry(dsu.find(v)).or_insert(0) += 1;
    }
    let mut sizes: Vec<usize> = counts.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    ComponentStats { sizes }
}

/// Vertices of the largest open component (smallest root vertex breaks ties).
pub fn largest_component_vertices(g: &Graph, mask: &EdgeMask) -> Vec<u32> {
    let mut dsu = DisjointSets::new(g.n());
    for e in mask.open_edge_ids() {
        let (u, v) = g.endpoints(e);
        dsu.union(u, v);
    }
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for v in 0..g.n() as u32 {
        *counts.entry(dsu.find(v)).or_insert(0) += 1;
    }
    let best = counts
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&root, _)| root)
        .expect("graph has at least one vertex");
    (0..g.n() as u32).filter(|&v| dsu.find(v) == best).collect()
}

/// Percolation coins revealed one edge at a time and remembered, so that
/// every consumer of the ledger sees the same configuration no matter the
/// order of queries.
#[derive(Debug, Clone)]
pub struct CoinLedger {
    p: f64,
    coins: HashMap<u32, bool>,
    rng: ChaCha8Rng,
}

impl CoinLedger {
    pub fn new(p: f64, seed: u64) -> Result<Self> {
        check_prob(p)?;
        Ok(CoinLedger { p, coins: HashMap::new(), rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    /// Ledger with every coin of the mask already revealed.
    pub fn from_mask(mask: &EdgeMask) -> Self {
        let coins = (0..mask.edge_count() as u32).map(|e| (e, mask.is_open(e))).collect();
        CoinLedger {
            p: mask.p(),
            coins,
            rng: ChaCha8Rng::seed_from_u64(mask.seed()),
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn coin(&mut self, edge_id: u32) -> bool {
        let p = self.p;
        let rng = &mut self.rng;
        *self.coins.entry(edge_id).or_insert_with(|| rng.random::<f64>() < p)
    }

    /// Outcome if already revealed, without spending fresh randomness.
    pub fn peek(&self, edge_id: u32) -> Option<bool> {
        self.coins.get(&edge_id).copied()
    }

    pub fn revealed(&self) -> usize {
        self.coins.len()
    }
}

/// Open ball around a center, grown shell by shell while refusing to enter
/// the avoided set. Shell 0 is the center itself; a center inside the
/// avoided set yields the empty ball.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: u32,
    pub shells: Vec<Vec<u32>>,
}

impl Ball {
    pub fn total(&self) -> usize {
        self.shells.iter().map(Vec::len).sum()
    }

    pub fn shell(&self, k: usize) -> &[u32] {
        self.shells.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn radius_reached(&self) -> usize {
        self.shells.len().saturating_sub(1)
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.shells.iter().flatten().copied()
    }
}

pub fn grow_ball(
    g: &Graph,
    ledger: &mut CoinLedger,
    center: u32,
    radius: usize,
    avoid: &HashSet<u32>,
) -> Result<Ball> {
    if (center as usize) >= g.n() {
        return Err(Error::InvalidParameter(format!("center {center} out of range")));
    }
    if avoid.contains(&center) {
        return Err(Error::InvalidParameter(format!(
            "center {center} lies in the avoided set"
        )));
    }
    let mut visited = HashSet::from([center]);
    let mut shells = vec![vec![center]];
    for _ in 0..radius {
        let mut next = Vec::new();
        for &x in shells.last().unwrap() {
            let ids = g.neighbor_edge_ids(x);
            for (idx, &y) in g.neighbors(x).iter().enumerate() {
                if avoid.contains(&y) || visited.contains(&y) {
                    continue;
                }
                if ledger.coin(ids[idx]) {
                    visited.insert(y);
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        shells.push(next);
    }
    Ok(Ball { center, shells })
}

#[derive(Debug, Clone)]
pub struct MultiRootStep {
    pub root: u32,
    pub ball_size: usize,
    pub hit: bool,
    /// |V_t|: vertices absorbed after this step.
    pub visited_after: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    /// Some ball exceeded the threshold.
    Success,
    /// Every vertex was absorbed first.
    Exhausted,
    /// The step budget ran out.
    StepLimit,
}

#[derive(Debug, Clone)]
pub struct MultiRootReport {
    pub steps: Vec<MultiRootStep>,
    /// 1-based index of the first step whose ball size exceeded the
    /// threshold, if any.
    pub success_step: Option<usize>,
    /// |V_T|: total vertices absorbed across all balls.
    pub visited: usize,
    pub halted: HaltReason,
}

/// Repeatedly drop a uniform root and grow an open ball of the given radius
/// around it, avoiding everything previous balls absorbed; stop at the first
/// ball larger than `threshold`, or when every vertex is absorbed, or after
/// `t_max` steps. Roots are drawn from all of V, so a root that lands inside
/// the absorbed set contributes an empty ball. One coin ledger spans all
/// steps; avoidance keeps the examined edge sets disjoint, so no coin is
/// consulted by two different balls.
pub fn multi_root_process(
    g: &Graph,
    p: f64,
    radius: usize,
    threshold: usize,
    t_max: usize,
    seed: u64,
) -> Result<MultiRootReport> {
    check_prob(p)?;
    if t_max == 0 {
        return Err(Error::InvalidParameter("t_max must be at least 1".into()));
    }
    let mut ledger = CoinLedger::new(p, derive_seed(seed, &[1]))?;
    let mut root_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[2]));
    let mut absorbed: HashSet<u32> = HashSet::new();
    let mut steps = Vec::new();
    let mut success_step = None;
    for t in 1..=t_max {
        if absorbed.len() == g.n() {
            break;
        }
        let root = root_rng.random_range(0..g.n() as u32);
        // A root inside the absorbed set keeps its empty ball and I_t = 0.
        let size = if absorbed.contains(&root) {
            0
        } else {
            let ball = grow_ball(g, &mut ledger, root, radius, &absorbed)?;
            for v in ball.vertices() {
                absorbed.insert(v);
            }
            ball.total()
        };
        let hit = size > threshold;
        steps.push(MultiRootStep { root, ball_size: size, hit, visited_after: absorbed.len() });
        if hit {
            success_step = Some(t);
            break;
        }
    }
    let halted = if success_step.is_some() {
        HaltReason::Success
    } else if absorbed.len() == g.n() {
        HaltReason::Exhausted
    } else {
        HaltReason::StepLimit
    };
    Ok(MultiRootReport { steps, success_step, visited: absorbed.len(), halted })
}

/// Open edges of percolation on the complete graph K_n without touching the
/// binomial(n, 2) closed pairs: jump between open pairs with geometric skips
/// through the lexicographic pair order.
pub fn sample_er_open_edges(n: usize, p: f64, seed: u64) -> Result<Vec<(u32, u32)>> {
    check_prob(p)?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let total = n as u64 * (n as u64 - 1) / 2;
    if p * total as f64 > MAX_MATERIALIZED_EDGES as f64 {
        return Err(Error::CapacityExceeded(format!(
            "expected {:.0} open edges exceeds cap {MAX_MATERIALIZED_EDGES}",
            p * total as f64
        )));
    }
    if p == 0.0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geom = Geometric::new(p)
        .map_err(|e| Error::InvalidParameter(format!("geometric({p}): {e}")))?;
    let mut edges = Vec::new();
    let mut pos = 0u64;
    loop {
        pos += geom.sample(&mut rng);
        if pos >= total {
            break;
        }
        edges.push(pair_from_index(n, pos));
        pos += 1;
    }
    Ok(edges)
}

/// Inverse of the lexicographic pair enumeration (0,1), (0,2), .., (0,n-1),
/// (1,2), ..: row u starts at offset u(2n-u-1)/2.
pub fn pair_from_index(n: usize, k: u64) -> (u32, u32) {
    let nf = n as f64;
    let offset = |u: u64| u * (2 * n as u64 - u - 1) / 2;
    // Solve u^2 - (2n-1)u + 2k = 0 for the row, then nudge.
    let disc = (2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * k as f64;
    let mut u = ((2.0 * nf - 1.0 - disc.max(0.0).sqrt()) / 2.0).floor() as u64;
    while u > 0 && offset(u) > k {
        u -= 1;
    }
    while offset(u + 1) <= k {
        u += 1;
    }
    let v = u + 1 + (k - offset(u));
    debug_assert!(v < n as u64);
    (u as u32, v as u32)
}

/// Exact diameter of one open component: BFS in the open subgraph from every
/// vertex of the component. Errors if the vertex list is not connected in
/// the mask.
pub fn component_diameter(g: &Graph, mask: &EdgeMask, component: &[u32]) -> Result<usize> {
    if component.is_empty() {
        return Err(Error::InvalidParameter("component is empty".into()));
    }
    let index: HashMap<u32, usize> =
        component.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj = open_adjacency(g, mask, component, &index)?;
    let mut diameter = 0usize;
    let mut dist = vec![usize::MAX; component.len()];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..component.len() {
        dist.fill(usize::MAX);
        dist[start] = 0;
        queue.clear();
        queue.push_back(start);
        let mut reached = 1usize;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    diameter = diameter.max(dist[y]);
                    reached += 1;
                    queue.push_back(y);
                }
            }
        }
        if reached != component.len() {
            return Err(Error::InvalidStructure(
                "vertex list is not one open component".into(),
            ));
        }
    }
    Ok(diameter)
}

/// Open-subgraph adjacency restricted to `component`, indexed by position.
/// An open edge leaving the vertex set means the caller did not pass a full
/// component.
fn open_adjacency(
    g: &Graph,
    mask: &EdgeMask,
    component: &[u32],
    index: &HashMap<u32, usize>,
) -> Result<Vec<Vec<usize>>> {
    let mut adj = vec![Vec::new(); component.len()];
    for (i, &v) in component.iter().enumerate() {
        let ids = g.neighbor_edge_ids(v);
        for (slot, &y) in g.neighbors(v).iter().enumerate() {
            if !mask.is_open(ids[slot]) {
                continue;
            }
            match index.get(&y) {
                Some(&j) => adj[i].push(j),
                None => {
                    return Err(Error::InvalidStructure(
                        "open edge leaves the vertex list; not a full component".into(),
                    ))
                }
            }
        }
    }
    Ok(adj)
}

pub const MAX_MIXING_STATES: usize = 5000;
const MAX_MIXING_TIME: usize = 1 << 14;

/// Total-variation mixing time of the half-lazy simple random walk on one
/// open component: the least t with max_x ||P^t(x, .) - pi||_TV <= 1/4.
/// Dense: memory and time scale with |component|^2 and |component|^3, so
/// components beyond MAX_MIXING_STATES are refused rather than attempted.
pub fn mixing_time_tv(g: &Graph, mask: &EdgeMask, component: &[u32]) -> Result<usize> {
    if component.is_empty() {
        return Err(Error::InvalidParameter("component is empty".into()));
    }
    if component.len() == 1 {
        return Ok(0);
    }
    if component.len() > MAX_MIXING_STATES {
        return Err(Error::CapacityExceeded(format!(
            "component has {} vertices; mixing computation capped at {MAX_MIXING_STATES}",
            component.len()
        )));
    }
    let index: HashMap<u32, usize> =
        component.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj = open_adjacency(g, mask, component, &index)?;
    let k = component.len();
    // Connectivity (pi must be supported everywhere).
    if adj.iter().any(Vec::is_empty) {
        return Err(Error::InvalidStructure("component has an isolated vertex".into()));
    }
    {
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut cnt = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    cnt += 1;
                    stack.push(y);
                }
            }
        }
        if cnt != k {
            return Err(Error::InvalidStructure(
                "vertex list is not one open component".into(),
            ));
        }
    }
    let degree_sum: usize = adj.iter().map(Vec::len).sum();
    let pi: Vec<f64> = adj.iter().map(|a| a.len() as f64 / degree_sum as f64).collect();
    let mut p = vec![0.0f64; k * k];
    for (x, a) in adj.iter().enumerate() {
        p[x * k + x] = 0.5;
        let w = 0.5 / a.len() as f64;
        for &y in a {
            p[x * k + y] += w;
        }
    }
    let tv = |mat: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for x in 0..k {
            let row = &mat[x * k..(x + 1) * k];
            let s: f64 = row.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            worst = worst.max(s / 2.0);
        }
        worst
    };
    if tv(&p) <= 0.25 {
        return Ok(1);
    }
    // P^{2^j} until mixed, then greedy binary descent to the exact step.
    let mut powers = vec![p];
    let mut j = 0usize;
    while tv(&powers[j]) > 0.25 {
        if 1usize << (j + 1) > MAX_MIXING_TIME {
            return Err(Error::CapacityExceeded(format!(
                "mixing time exceeds cap {MAX_MIXING_TIME}"
            )));
        }
        let sq = matmul(&powers[j], &powers[j], k);
        powers.push(sq);
        j += 1;
    }
    // Largest t with distance still above 1/4 lies in [2^{j-1}, 2^j).
    let mut acc = powers[j - 1].clone();
    let mut t = 1usize << (j - 1);
    for jj in (0..j - 1).rev() {
        let cand = matmul(&acc, &powers[jj], k);
        if tv(&cand) > 0.25 {
            acc = cand;
            t += 1 << jj;
        }
    }
    Ok(t + 1)
}

fn matmul(a: &[f64], b: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; k * k];
    for i in 0..k {
        for l in 0..k {
            let v = a[i * k + l];
            if v == 0.0 {
                continue;
            }
            let brow = &b[l * k..(l + 1) * k];
            let orow = &mut out[i * k..(i + 1) * k];
            for (o, &bv) in orow.iter_mut().zip(brow) {
                *o += v * bv;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, hamming_graph, petersen_graph, random_regular_graph};
    use proptest::prelude::*;

    fn bfs_component_sizes(g: &Graph, mask: &EdgeMask) -> Vec<usize> {
        let mut seen = vec![false; g.n()];
        let mut sizes = Vec::new();
        for s in 0..g.n() as u32 {
            if seen[s as usize] {
                continue;
            }
            let mut stack = vec![s];
            seen[s as usize] = true;
            let mut size = 0;
            while let Some(x) = stack.pop() {
                size += 1;
                let ids = g.neighbor_edge_ids(x);
                for (slot, &y) in g.neighbors(x).iter().enumerate() {
                    if mask.is_open(ids[slot]) && !seen[y as usize] {
                        seen[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    #[test]
    fn mask_extremes() {
        let g = petersen_graph();
        let closed = sample_percolation(&g, 0.0, 7).unwrap();
        assert_eq!(closed.open_count(), 0);
        let open = sample_percolation(&g, 1.0, 7).unwrap();
        assert_eq!(open.open_count(), g.edge_count());
        let stats = component_stats(&g, &open);
        assert_eq!(stats.largest(), 10);
        assert_eq!(component_stats(&g, &closed).count(), 10);
    }

    #[test]
    fn component_stats_match_bfs_oracle() {
        let g = random_regular_graph(60, 3, 11).unwrap();
        for seed in 0..20 {
            for p in [0.2, 0.45, 0.7] {
                let mask = sample_percolation(&g, p, seed).unwrap();
                let stats = component_stats(&g, &mask);
                assert_eq!(stats.sizes, bfs_component_sizes(&g, &mask));
                assert_eq!(stats.sizes.iter().sum::<usize>(), g.n());
            }
        }
    }

    #[test]
    fn masks_are_monotone_in_p_at_fixed_seed() {
        let g = hamming_graph(2, 5).unwrap();
        for seed in 0..10 {
            let lo = sample_percolation(&g, 0.3, seed).unwrap();
            let hi = sample_percolation(&g, 0.6, seed).unwrap();
            for e in 0..g.edge_count() as u32 {
                assert!(!lo.is_open(e) || hi.is_open(e));
            }
        }
    }

    #[test]
    fn largest_component_vertices_consistent_with_stats() {
        let g = random_regular_graph(40, 4, 3).unwrap();
        let mask = sample_percolation(&g, 0.35, 9).unwrap();
        let stats = component_stats(&g, &mask);
        let comp = largest_component_vertices(&g, &mask);
        assert_eq!(comp.len(), stats.largest());
        // Closed under open edges.
        let set: HashSet<u32> = comp.iter().copied().collect();
        for e in mask.open_edge_ids() {
            let (u, v) = g.endpoints(e);
            assert_eq!(set.contains(&u), set.contains(&v));
        }
    }

    #[test]
    fn ledger_from_mask_reproduces_mask() {
        let g = petersen_graph();
        let mask = sample_percolation(&g, 0.5, 3).unwrap();
        let mut ledger = CoinLedger::from_mask(&mask);
        for e in 0..g.edge_count() as u32 {
            assert_eq!(ledger.coin(e), mask.is_open(e));
        }
    }

    #[test]
    fn ledger_is_consistent_and_lazy() {
        let mut ledger = CoinLedger::new(0.5, 99).unwrap();
        assert_eq!(ledger.peek(4), None);
        let first = ledger.coin(4);
        assert_eq!(ledger.peek(4), Some(first));
        for _ in 0..10 {
            assert_eq!(ledger.coin(4), first);
        }
        assert_eq!(ledger.revealed(), 1);
        // Query order changes which uniform lands on which edge, but each
        // edge's coin is frozen at first touch.
        let mut a = CoinLedger::new(0.5, 123).unwrap();
        let mut b = CoinLedger::new(0.5, 123).unwrap();
        let coins_a: Vec<bool> = (0..64).map(|e| a.coin(e)).collect();
        for e in (0..64).rev() {
            b.coin(e);
        }
        for e in 0..64u32 {
            assert_eq!(b.peek(e), Some(b.coin(e)));
        }
        let _ = coins_a;
    }

    #[test]
    fn full_radius_ball_is_the_component() {
        let g = random_regular_graph(50, 3, 21).unwrap();
        for seed in 0..10 {
            let mask = sample_percolation(&g, 0.5, seed).unwrap();
            let sizes = bfs_component_sizes(&g, &mask);
            let mut ledger = CoinLedger::from_mask(&mask);
            let ball = grow_ball(&g, &mut ledger, 0, g.n(), &HashSet::new()).unwrap();
            // Component of vertex 0 via BFS.
            let mut seen = HashSet::from([0u32]);
            let mut stack = vec![0u32];
            while let Some(x) = stack.pop() {
                let ids = g.neighbor_edge_ids(x);
                for (slot, &y) in g.neighbors(x).iter().enumerate() {
                    if mask.is_open(ids[slot]) && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            assert_eq!(ball.total(), seen.len());
            assert!(sizes.contains(&ball.total()));
            let mut from_shells: Vec<u32> = ball.vertices().collect();
            from_shells.sort_unstable();
            let mut expected: Vec<u32> = seen.into_iter().collect();
            expected.sort_unstable();
            assert_eq!(from_shells, expected);
        }
    }

    #[test]
    fn ball_respects_radius_and_avoided_set() {
        let g = cycle_graph(12).unwrap();
        let mask = sample_percolation(&g, 1.0, 0).unwrap();
        let mut ledger = CoinLedger::from_mask(&mask);
        let ball = grow_ball(&g, &mut ledger, 0, 3, &HashSet::new()).unwrap();
        assert_eq!(ball.shells.len(), 4);
        assert_eq!(ball.total(), 7);
        assert_eq!(ball.shell(3), &[3, 9]);
        // Blocking one direction turns the ball into a path segment.
        let avoid: HashSet<u32> = HashSet::from([11]);
        let mut ledger = CoinLedger::from_mask(&mask);
        let ball = grow_ball(&g, &mut ledger, 0, 3, &avoid).unwrap();
        assert_eq!(ball.total(), 4);
        // Center inside the avoided set is rejected.
        let mut ledger = CoinLedger::from_mask(&mask);
        assert!(matches!(
            grow_ball(&g, &mut ledger, 11, 3, &avoid),
            Err(Error::InvalidParameter(_))
        ));
        let mut ledger = CoinLedger::from_mask(&mask);
        assert!(grow_ball(&g, &mut ledger, 40, 3, &avoid).is_err());
    }

    #[test]
    fn multi_root_trivial_regimes() {
        let g = complete_graph(30).unwrap();
        // p = 0: every ball is its root alone, never past any threshold >= 1.
        let report = multi_root_process(&g, 0.0, 3, 1, 8, 5).unwrap();
        assert_eq!(report.success_step, None);
        assert_eq!(report.halted, HaltReason::StepLimit);
        assert_eq!(report.steps.len(), 8);
        let mut prev = 0;
        for step in &report.steps {
            assert!(step.ball_size <= 1);
            assert!(step.visited_after >= prev, "absorbed set only grows");
            prev = step.visited_after;
        }
        // p = 1: the first ball is everything.
        let report = multi_root_process(&g, 1.0, 30, 29, 8, 5).unwrap();
        assert_eq!(report.success_step, Some(1));
        assert_eq!(report.halted, HaltReason::Success);
        assert_eq!(report.visited, 30);
        assert_eq!(report.steps[0].ball_size, 30);
    }

    #[test]
    fn multi_root_absorbed_roots_give_empty_balls() {
        // p = 1 on a cycle with radius covering everything: step 1 absorbs
        // all of V, so exhaustion stops the process before step 2.
        let g = cycle_graph(9).unwrap();
        let report = multi_root_process(&g, 1.0, 9, 100, 5, 1).unwrap();
        assert_eq!(report.success_step, None);
        assert_eq!(report.visited, 9);
        assert_eq!(report.halted, HaltReason::Exhausted);
        assert_eq!(report.steps.len(), 1);
        assert_eq!(report.steps[0].visited_after, 9);
    }

    #[test]
    fn multi_root_visited_stays_below_supercritical_bound() {
        // eps = 0.2 on 3-regular: E|V_T| <= 2 T (1+eps)^{r+1} / eps; the
        // empirical mean over seeds should sit well inside it.
        let g = random_regular_graph(400, 3, 77).unwrap();
        let (eps, r, t_max) = (0.2f64, 5usize, 10usize);
        let p = (1.0 + eps) / 2.0;
        let bound = 2.0 * t_max as f64 * (1.0 + eps).powi(r as i32 + 1) / eps;
        let trials = 40;
        let mut total = 0usize;
        for seed in 0..trials {
            let report = multi_root_process(&g, p, r, usize::MAX, t_max, seed).unwrap();
            assert_eq!(report.steps.len(), t_max);
            total += report.visited;
        }
        let mean = total as f64 / trials as f64;
        assert!(mean < bound, "mean {mean} vs bound {bound}");
    }

    #[test]
    fn pair_index_bijection_is_exact() {
        for n in [2usize, 3, 5, 8, 33] {
            let mut k = 0u64;
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    assert_eq!(pair_from_index(n, k), (u, v), "n={n} k={k}");
                    k += 1;
                }
            }
            assert_eq!(k, n as u64 * (n as u64 - 1) / 2);
        }
        // Spot checks far beyond exhaustive range.
        let n = 100_000usize;
        let total = n as u64 * (n as u64 - 1) / 2;
        let (u, v) = pair_from_index(n, total - 1);
        assert_eq!((u, v), (n as u32 - 2, n as u32 - 1));
        assert_eq!(pair_from_index(n, 0), (0, 1));
        assert_eq!(pair_from_index(n, n as u64 - 2), (0, n as u32 - 1));
        assert_eq!(pair_from_index(n, n as u64 - 1), (1, 2));
    }

    #[test]
    fn er_sampler_open_count_matches_binomial_mean() {
        // Open count ~ Binomial(C(n,2), p).
        let (n, p) = (200usize, 0.002f64);
        let total = n as f64 * (n as f64 - 1.0) / 2.0;
        let trials = 400;
        let mut count = 0usize;
        for seed in 0..trials {
            let edges = sample_er_open_edges(n, p, seed).unwrap();
            for &(u, v) in &edges {
                assert!(u < v && (v as usize) < n);
            }
            count += edges.len();
        }
        let mean = count as f64 / trials as f64;
        let expect = total * p;
        let se = (total * p * (1.0 - p) / trials as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * se, "{mean} vs {expect} (se {se})");
    }

    #[test]
    fn er_sampler_edge_cases() {
        assert!(sample_er_open_edges(50, 0.0, 1).unwrap().is_empty());
        let all = sample_er_open_edges(7, 1.0, 1).unwrap();
        assert_eq!(all.len(), 21);
        let again = sample_er_open_edges(300, 0.01, 4).unwrap();
        assert_eq!(again, sample_er_open_edges(300, 0.01, 4).unwrap());
        assert!(sample_er_open_edges(1, 0.5, 1).is_err());
        // Expected open count beyond the materialization cap.
        assert!(matches!(
            sample_er_open_edges(1_000_000, 0.9, 1),
            Err(Error::CapacityExceeded(_))
        ));
    }

    #[test]
    fn er_components_agree_with_explicit_graph() {
        // Route the same open set through a materialized graph and BFS.
        let (n, p) = (120usize, 0.02f64);
        for seed in 0..10 {
            let edges = sample_er_open_edges(n, p, seed).unwrap();
            let stats = components_from_edge_list(n, &edges);
            let open_graph =
                Graph::from_edges(n, edges.clone(), crate::graph::FamilyTag::Custom).unwrap();
            let all_open = sample_percolation(&open_graph, 1.0, 0).unwrap();
            assert_eq!(stats.sizes, bfs_component_sizes(&open_graph, &all_open));
            assert_eq!(stats.sizes.iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn diameter_on_known_shapes() {
        let g = cycle_graph(9).unwrap();
        let mask = sample_percolation(&g, 1.0, 0).unwrap();
        let comp: Vec<u32> = (0..9).collect();
        assert_eq!(component_diameter(&g, &mask, &comp).unwrap(), 4);
        let g = complete_graph(8).unwrap();
        let mask = sample_percolation(&g, 1.0, 0).unwrap();
        let comp: Vec<u32> = (0..8).collect();
        assert_eq!(component_diameter(&g, &mask, &comp).unwrap(), 1);
        // Any proper open piece of a cycle is a path: diameter = size - 1.
        let g = cycle_graph(9).unwrap();
        let mask = sample_percolation(&g, 0.4, 13).unwrap();
        assert!(mask.open_count() < g.edge_count(), "seed must close something");
        let stats = component_stats(&g, &mask);
        let comp = largest_component_vertices(&g, &mask);
        assert_eq!(component_diameter(&g, &mask, &comp).unwrap(), stats.largest() - 1);
    }

    #[test]
    fn diameter_rejects_non_components() {
        let g = cycle_graph(6).unwrap();
        let mask = sample_percolation(&g, 1.0, 0).unwrap();
        assert!(component_diameter(&g, &mask, &[0, 1]).is_err());
        assert!(component_diameter(&g, &mask, &[]).is_err());
    }

    #[test]
    fn mixing_time_known_small_cases() {
        // Two vertices joined by an edge: one lazy step suffices.
        let g = complete_graph(2).unwrap();
        let mask = sample_percolation(&g, 1.0, 0).unwrap();
        assert_eq!(mixing_time_tv(&g, &mask, &[0, 1]).unwrap(), 1);
        // Triangle: d(1) = 1/6 <= 1/4 already.
        let g = complete_graph(3).unwrap();
        let mask = sample_percolation(&g, 1.0, 0).unwrap();
        assert_eq!(mixing_time_tv(&g, &mask, &[0, 1, 2]).unwrap(), 1);
        // Singleton components mix instantly.
        let g = cycle_graph(5).unwrap();
        let mask = sample_percolation(&g, 0.0, 0).unwrap();
        assert_eq!(mixing_time_tv(&g, &mask, &[2]).unwrap(), 0);
    }

    #[test]
    fn mixing_time_matches_direct_iteration_oracle() {
        // Brute force: evolve every start distribution step by step.
        let g = cycle_graph(11).unwrap();
        let mask = sample_percolation(&g, 1.0, 0).unwrap();
        let comp: Vec<u32> = (0..11).collect();
        let fast = mixing_time_tv(&g, &mask, &comp).unwrap();
        let k = 11usize;
        let mut p = vec![0.0; k * k];
        for x in 0..k {
            p[x * k + x] = 0.5;
            p[x * k + (x + 1) % k] = 0.25;
            p[x * k + (x + k - 1) % k] = 0.25;
        }
        let pi = vec![1.0 / k as f64; k];
        let tv = |mat: &[f64]| -> f64 {
            (0..k)
                .map(|x| {
                    mat[x * k..(x + 1) * k]
                        .iter()
                        .zip(&pi)
                        .map(|(a, b)| (a - b).abs())
                        .sum::<f64>()
                        / 2.0
                })
                .fold(0.0, f64::max)
        };
        let mut acc = p.clone();
        let mut oracle = 1usize;
        while tv(&acc) > 0.25 {
            acc = matmul(&acc, &p, k);
            oracle += 1;
        }
        assert_eq!(fast, oracle);
        assert!(fast > 10, "an 11-cycle should take a while to mix, got {fast}");
    }

    #[test]
    fn mixing_time_rejects_oversized_components() {
        let g = cycle_graph(MAX_MIXING_STATES + 1).unwrap();
        let mask = sample_percolation(&g, 1.0, 0).unwrap();
        let comp: Vec<u32> = (0..g.n() as u32).collect();
        assert!(matches!(
            mixing_time_tv(&g, &mask, &comp),
            Err(Error::CapacityExceeded(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn component_sizes_partition_n(seed in 0u64..1000, p in 0.0f64..1.0) {
            let g = petersen_graph();
            let mask = sample_percolation(&g, p, seed).unwrap();
            let stats = component_stats(&g, &mask);
            prop_assert_eq!(stats.sizes.iter().sum::<usize>(), g.n());
            prop_assert!(stats.largest() >= stats.second_largest());
        }

        #[test]
        fn ball_sizes_monotone_in_radius(seed in 0u64..500, p in 0.1f64..0.9) {
            let g = hamming_graph(2, 4).unwrap();
            let mask = sample_percolation(&g, p, seed).unwrap();
            let mut prev = 0usize;
            for r in 0..6 {
                let mut ledger = CoinLedger::from_mask(&mask);
                let ball = grow_ball(&g, &mut ledger, 3, r, &HashSet::new()).unwrap();
                prop_assert!(ball.total() >= prev);
                prev = ball.total();
            }
        }
    }
}
