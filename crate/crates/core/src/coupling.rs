//! Coupling between percolation on a graph and percolation on its covering
//! tree. The covering tree unrolls all non-backtracking paths from a root
//! vertex; a joint exploration reveals each examined graph edge and its
//! corresponding tree edge together, which sandwiches the graph ball's shell
//! sizes between two tree-side level counts.
//!
//! The same machinery yields a closed-form lower bound on expected shell
//! sizes in terms of the non-backtracking return profile, and the checkable
//! hypotheses under which a ball of radius r is large with quantified
//! probability.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::nbrw::ReturnProfile;
use crate::percolation::CoinLedger;
use crate::{Error, Result};

pub const DEFAULT_TREE_NODE_BUDGET: usize = 5_000_000;

/// Finite segment of the covering tree of a graph, rooted at some vertex:
/// every node carries a graph-vertex label, and the children of a node are
/// the neighbors of its label except the parent's label, in ascending label
/// order. Distinct nodes may share a label; that is the whole point.
#[derive(Debug, Clone)]
pub struct LabelledTree {
    labels: Vec<u32>,
    parents: Vec<u32>,
    depths: Vec<u32>,
    child_start: Vec<u32>,
    level_start: Vec<u32>,
}

impl LabelledTree {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Deepest level present.
    pub fn height(&self) -> usize {
        self.level_start.len() - 2
    }

    pub fn label(&self, w: u32) -> u32 {
        self.labels[w as usize]
    }

    pub fn parent(&self, w: u32) -> Option<u32> {
        (w != 0).then(|| self.parents[w as usize])
    }

    pub fn node_depth(&self, w: u32) -> usize {
        self.depths[w as usize] as usize
    }

    pub fn children(&self, w: u32) -> std::ops::Range<u32> {
        self.child_start[w as usize]..self.child_start[w as usize + 1]
    }

    /// Node indices of one level; empty past the height.
    pub fn nodes_at_depth(&self, k: usize) -> std::ops::Range<u32> {
        if k + 1 >= self.level_start.len() {
            return 0..0;
        }
        self.level_start[k]..self.level_start[k + 1]
    }

    /// The child of w whose label is `label`, via binary search in the
    /// label-sorted child block.
    pub fn child_with_label(&self, w: u32, label: u32) -> Option<u32> {
        let range = self.children(w);
        let slice = &self.labels[range.start as usize..range.end as usize];
        slice.binary_search(&label).ok().map(|i| range.start + i as u32)
    }
}

pub fn build_covering_tree(
    g: &Graph,
    root: u32,
    height: usize,
    node_budget: usize,
) -> Result<LabelledTree> {
    if (root as usize) >= g.n() {
        return Err(Error::InvalidParameter(format!("root {root} out of range")));
    }
    let mut labels = vec![root];
    let mut parents = vec![0u32];
    let mut depths = vec![0u32];
    let mut level_start = vec![0u32, 1];
    for depth in 1..=height {
        let (lo, hi) = (level_start[depth - 1] as usize, level_start[depth] as usize);
        if lo == hi {
            break;
        }
        for w in lo..hi {
            let wl = labels[w];
            let parent_label = (w != 0).then(|| labels[parents[w] as usize]);
            for &y in g.neighbors(wl) {
                if Some(y) == parent_label {
                    continue;
                }
                if labels.len() >= node_budget {
                    return Err(Error::CapacityExceeded(format!(
                        "covering tree exceeds {node_budget} nodes at depth {depth}"
                    )));
                }
                labels.push(y);
                parents.push(w as u32);
                depths.push(depth as u32);
            }
        }
        level_start.push(labels.len() as u32);
    }
    // Children were appended while scanning parents in index order, so each
    // node's children form one contiguous block.
    let mut child_start = vec![0u32; labels.len() + 1];
    for w in 1..labels.len() {
        child_start[parents[w] as usize + 1] += 1;
    }
    child_start[0] = 1;
    for w in 1..=labels.len() {
        child_start[w] += child_start[w - 1];
    }
    Ok(LabelledTree { labels, parents, depths, child_start, level_start })
}

/// Per-node classification of a percolated labelled tree. A node w is impure
/// when some node u with depth(u) <= depth(w) carries the same label and has
/// an open path up to the meet of u and w; at equal depths each of the two
/// is judged by whether the *other* one reaches the meet. `connected` means
/// an open path all the way to the root.
#[derive(Debug, Clone)]
pub struct PurityClasses {
    pub impure: Vec<bool>,
    pub path_pure: Vec<bool>,
    pub connected: Vec<bool>,
}

/// `open[w]` is the state of the edge from w to its parent (ignored for the
/// root).
pub fn classify_purity(tree: &LabelledTree, open: &[bool]) -> PurityClasses {
    let n = tree.node_count();
    assert_eq!(open.len(), n, "one coin per node");
    // Shallowest depth reachable from each node along open edges upward.
    let mut up_reach = vec![0u32; n];
    for w in 1..n {
        up_reach[w] = if open[w] { up_reach[tree.parents[w] as usize] } else { tree.depths[w] };
    }
    let lca_depth = |a: u32, b: u32| -> u32 {
        let (mut a, mut b) = (a as usize, b as usize);
        while tree.depths[a] > tree.depths[b] {
            a = tree.parents[a] as usize;
        }
        while tree.depths[b] > tree.depths[a] {
            b = tree.parents[b] as usize;
        }
        while a != b {
            a = tree.parents[a] as usize;
            b = tree.parents[b] as usize;
        }
        tree.depths[a]
    };
    let mut groups: HashMap<u32, Vec<u32>> = HashMap::new();
    for w in 0..n as u32 {
        groups.entry(tree.labels[w as usize]).or_default().push(w);
    }
    let mut impure = vec![false; n];
    for group in groups.values() {
        // Node order is breadth-first, so depths ascend within the group.
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                let (a, b) = (group[i], group[j]);
                let meet = lca_depth(a, b);
                if up_reach[a as usize] <= meet {
                    impure[b as usize] = true;
                }
                if tree.depths[a as usize] == tree.depths[b as usize]
                    && up_reach[b as usize] <= meet
                {
                    impure[a as usize] = true;
                }
            }
        }
    }
    let mut path_pure = vec![false; n];
    path_pure[0] = true;
    for w in 1..n {
        path_pure[w] = !impure[w] && path_pure[tree.parents[w] as usize];
    }
    let connected = (0..n).map(|w| up_reach[w] == 0).collect();
    PurityClasses { impure, path_pure, connected }
}

/// One draw of the coupled pair: a percolated covering tree and the graph
/// ball it dominates.
#[derive(Debug, Clone)]
pub struct CouplingSample {
    pub tree: LabelledTree,
    /// Edge-to-parent state per node, root entry fixed open.
    pub open: Vec<bool>,
    pub purity: PurityClasses,
    pub a_free: Vec<bool>,
    /// Graph shell sizes |boundary of the avoided-set ball| for 0..=r.
    pub shell_sizes: Vec<usize>,
    /// Tree nodes per level with an open path to the root.
    pub h: Vec<u64>,
    /// Of those, the path-pure avoided-set-free ones.
    pub x: Vec<u64>,
    /// Examined graph edge id -> the tree node whose parent edge shares its
    /// coin.
    pub edge_nodes: HashMap<u32, u32>,
    /// Distance from the root for every vertex the exploration reached.
    pub heights: HashMap<u32, usize>,
}

impl CouplingSample {
    /// x[k] <= shell[k] <= h[k] for every level.
    pub fn sandwich_holds(&self) -> bool {
        (0..self.h.len())
            .all(|k| self.x[k] <= self.shell_sizes[k] as u64 && self.shell_sizes[k] as u64 <= self.h[k])
    }
}

/// Grow the avoided-set ball of radius r around v in the graph while
/// revealing tree coins in lockstep: every edge the ball exploration
/// examines (from the vertex being processed to a still-undiscovered
/// neighbor outside `avoid`) shares its coin with the corresponding tree
/// edge, and every other tree edge draws a fresh coin from `fresh_seed`, in
/// node order. The returned level counts then satisfy the sandwich
/// pathwise, not just in law.
pub fn joint_sample(
    g: &Graph,
    v: u32,
    r: usize,
    avoid: &HashSet<u32>,
    ledger: &mut CoinLedger,
    fresh_seed: u64,
) -> Result<CouplingSample> {
    if (v as usize) >= g.n() {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    if avoid.contains(&v) {
        return Err(Error::InvalidParameter(format!(
            "root {v} lies in the avoided set"
        )));
    }
    let tree = build_covering_tree(g, v, r, DEFAULT_TREE_NODE_BUDGET)?;
    let nodes = tree.node_count();
    let mut bound: Vec<Option<bool>> = vec![None; nodes];
    let mut shell_sizes = vec![0usize; r + 1];
    let mut edge_nodes: HashMap<u32, u32> = HashMap::new();
    let mut node_of: HashMap<u32, u32> = HashMap::from([(v, 0)]);
    let mut heights: HashMap<u32, usize> = HashMap::from([(v, 0)]);
    let mut queue = VecDeque::from([v]);
    shell_sizes[0] = 1;
    while let Some(x) = queue.pop_front() {
        let hx = heights[&x];
        if hx == r {
            continue;
        }
        let w = node_of[&x];
        let ids = g.neighbor_edge_ids(x);
        for (slot, &y) in g.neighbors(x).iter().enumerate() {
            if avoid.contains(&y) || heights.contains_key(&y) {
                continue;
            }
            let open = ledger.coin(ids[slot]);
            let child = tree
                .child_with_label(w, y)
                .expect("undiscovered neighbor is a covering-tree child");
            bound[child as usize] = Some(open);
            edge_nodes.insert(ids[slot], child);
            if open {
                node_of.insert(y, child);
                heights.insert(y, hx + 1);
                shell_sizes[hx + 1] += 1;
                queue.push_back(y);
            }
        }
    }
    let p = ledger.p();
    let mut fresh = ChaCha8Rng::seed_from_u64(fresh_seed);
    let mut open = vec![true; nodes];
    for w in 1..nodes {
        open[w] = bound[w].unwrap_or_else(|| fresh.random::<f64>() < p);
    }
    let purity = classify_purity(&tree, &open);
    let mut a_free = vec![false; nodes];
    a_free[0] = true;
    for w in 1..nodes {
        a_free[w] =
            a_free[tree.parents[w] as usize] && !avoid.contains(&tree.labels[w]);
    }
    let mut h = vec![0u64; r + 1];
    let mut x = vec![0u64; r + 1];
    for k in 0..=r {
        for w in tree.nodes_at_depth(k) {
            let w = w as usize;
            if purity.connected[w] {
                h[k] += 1;
                if purity.path_pure[w] && a_free[w] {
                    x[k] += 1;
                }
            }
        }
    }
    Ok(CouplingSample { tree, open, purity, a_free, shell_sizes, h, x, edge_nodes, heights })
}

/// sum over 2 <= k <= h <= r, 1 <= j < k of growth^{k-j} R[h+k-2j]: the
/// expected number of label collisions between a spine of length r and the
/// side subtrees hanging off it, when the walk forgets its past at rate
/// given by the return profile. Index h+k-2j is the combined length of the
/// two non-backtracking walks that must collide, so the sum vanishes on
/// graphs whose girth exceeds 2r - 2.
fn spine_collision_sum(profile: &ReturnProfile, growth: f64, r: usize) -> f64 {
    let mut sum = 0.0;
    for h in 2..=r {
        for k in 2..=h {
            for j in 1..k {
                sum += growth.powi((k - j) as i32) * profile.at(h + k - 2 * j);
            }
        }
    }
    sum
}

/// Return-profile horizon the radius-r shell bound consults.
pub fn profile_horizon_needed(r: usize) -> usize {
    if r >= 2 {
        2 * r - 2
    } else {
        1
    }
}

fn require_horizon(profile: &ReturnProfile, r: usize) -> Result<()> {
    if r >= 2 && profile.horizon() < profile_horizon_needed(r) {
        return Err(Error::HorizonTooShort {
            needed: profile_horizon_needed(r),
            have: profile.horizon(),
        });
    }
    Ok(())
}

/// Lower bound on E|shell of the avoided-set ball at radius r| for a
/// d-regular graph, with the root drawn uniformly (roots inside the avoided
/// set contribute empty balls):
///
/// (p(d-1))^r [ 1 - r|A|/n - (d/(d-1)) * collision sum ].
///
/// The bracket can go negative, in which case the bound is vacuous. The
/// collision correction only charges meets off the root, so the estimate is
/// meaningful in the regime it is built for: radii small relative to girth
/// and mixing scales. Requires the profile out to 2r - 2.
pub fn shell_lower_bound(
    profile: &ReturnProfile,
    d: usize,
    p: f64,
    r: usize,
    avoid_size: usize,
    n: usize,
) -> Result<f64> {
    if d < 3 {
        return Err(Error::OutOfModel(format!("degree must be at least 3, got {d}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("radius must be at least 1".into()));
    }
    if n == 0 || avoid_size > n {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= |A| <= n, got |A| = {avoid_size}, n = {n}"
        )));
    }
    require_horizon(profile, r)?;
    let growth = p * (d as f64 - 1.0);
    let bracket = 1.0
        - (r * avoid_size) as f64 / n as f64
        - d as f64 / (d as f64 - 1.0) * spine_collision_sum(profile, growth, r);
    Ok(growth.powi(r as i32) * bracket)
}

/// The two checkable hypotheses under which a radius-r ball is large with
/// probability bounded below, plus that conclusion's scale (its existential
/// constant set to 1). Valid for avoided sets of size at most n/(4r).
#[derive(Debug, Clone)]
pub struct LargeBallReport {
    pub supercritical: bool,
    pub eps: f64,
    pub r: usize,
    pub m: f64,
    /// (d/(d-1)) * collision sum; hypothesis 1 wants this at most 1/2.
    pub collision_term: f64,
    pub collision_condition: bool,
    /// Hypothesis 2 compares 96 m against this capacity.
    pub capacity: f64,
    pub capacity_condition: bool,
    /// P(|ball| >= m) is at least a constant times this when both hold.
    pub success_scale: f64,
}

impl LargeBallReport {
    pub fn both_hold(&self) -> bool {
        self.collision_condition && self.capacity_condition
    }
}

fn check_large_ball_inputs(d: usize, eps: f64, r: usize, m: f64) -> Result<()> {
    if d < 3 {
        return Err(Error::OutOfModel(format!("degree must be at least 3, got {d}")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if r == 0 {
        return Err(Error::InvalidParameter("radius must be at least 1".into()));
    }
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold must be positive, got {m}")));
    }
    Ok(())
}

/// p = (1+eps)/(d-1): capacity eps^{-2} [(1+eps)^r - (1+eps)^{r/2}]
/// (1 - e^{-eps r/4}), success scale
/// eps (1 - (1+eps)^{-r/2})^2 (1 - e^{-eps r/4})^3.
pub fn supercritical_large_ball_conditions(
    profile: &ReturnProfile,
    d: usize,
    eps: f64,
    r: usize,
    m: f64,
) -> Result<LargeBallReport> {
    check_large_ball_inputs(d, eps, r, m)?;
    require_horizon(profile, r)?;
    let rf = r as f64;
    let collision_term =
        d as f64 / (d as f64 - 1.0) * spine_collision_sum(profile, 1.0 + eps, r);
    let capacity = eps.powi(-2)
        * ((1.0 + eps).powf(rf) - (1.0 + eps).powf(rf / 2.0))
        * (-f64::exp_m1(-eps * rf / 4.0));
    let success_scale = eps
        * (1.0 - (1.0 + eps).powf(-rf / 2.0)).powi(2)
        * (-f64::exp_m1(-eps * rf / 4.0)).powi(3);
    Ok(LargeBallReport {
        supercritical: true,
        eps,
        r,
        m,
        collision_term,
        collision_condition: collision_term <= 0.5,
        capacity,
        capacity_condition: 96.0 * m < capacity,
        success_scale,
    })
}

/// p = (1-eps)/(d-1): capacity eps^{-1} r [(1-eps)^{r/2} - (1-eps)^r],
/// success scale eps^3 r^2 (1-eps)^r [(1-eps)^{r/2} - (1-eps)^r]^2.
pub fn subcritical_large_ball_conditions(
    profile: &ReturnProfile,
    d: usize,
    eps: f64,
    r: usize,
    m: f64,
) -> Result<LargeBallReport> {
    check_large_ball_inputs(d, eps, r, m)?;
    require_horizon(profile, r)?;
    let rf = r as f64;
    let collision_term =
        d as f64 / (d as f64 - 1.0) * spine_collision_sum(profile, 1.0 - eps, r);
    let gap = (1.0 - eps).powf(rf / 2.0) - (1.0 - eps).powf(rf);
    let capacity = eps.powi(-1) * rf * gap;
    let success_scale = eps.powi(3) * rf * rf * (1.0 - eps).powf(rf) * gap * gap;
    Ok(LargeBallReport {
        supercritical: false,
        eps,
        r,
        m,
        collision_term,
        collision_condition: collision_term <= 0.5,
        capacity,
        capacity_condition: 96.0 * m < capacity,
        success_scale,
    })
}
