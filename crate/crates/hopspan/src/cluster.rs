//! Exponential start time clustering.
//!
//! Every vertex draws an exponential head start and the graph is partitioned
//! by the shifted-distance argmin: `v` joins the center `u` minimizing
//! `dist(u, v) - shift(u)`. Two modes are provided:
//!
//! * `Exact` — the definitional argmin, computed through a super-source
//!   shortest-path tree with edge lengths `shift_max - shift(u)`; the
//!   subtrees below the source are the clusters.
//! * `Rounds` — the frontier implementation that only looks at the integer
//!   parts of the shifts; it advances one unit step per round and records the
//!   round count as the depth proxy. Requires integer edge weights.
//!
//! Shifts are quantized to 32-bit fixed point, so every comparison the argmin
//! makes is exact integer arithmetic and the output is schedule-independent.
//! Ties break toward the smaller shifted distance, then the smaller center
//! id, then the smaller (parent, edge) pair.

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Rat, VertexId, NO_VERTEX};
use crate::sssp::dijkstra;
use crate::util::Frac;
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub const SHIFT_FRAC_BITS: u32 = 32;

/// Per-vertex exponential head start in 32-bit fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Shift(pub u64);

impl Shift {
    pub fn from_f64(x: f64) -> Shift {
        let clamped = x.max(0.0).min((1u64 << 40) as f64);
        Shift((clamped * (1u64 << SHIFT_FRAC_BITS) as f64).floor() as u64)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / (1u64 << SHIFT_FRAC_BITS) as f64
    }

    /// Integer part, used by the round-based mode.
    pub fn floor(self) -> u64 {
        self.0 >> SHIFT_FRAC_BITS
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterMode {
    Exact,
    Rounds,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterParams {
    /// Rate parameter in (0, 1); larger means smaller clusters.
    pub beta: f64,
    /// Confidence parameter for the diameter bound `(k'/beta) ln n`.
    pub k_prime: f64,
    pub seed: u64,
    pub mode: ClusterMode,
}

impl ClusterParams {
    pub fn new(beta: f64, seed: u64) -> ClusterParams {
        ClusterParams {
            beta,
            k_prime: 2.0,
            seed,
            mode: ClusterMode::Exact,
        }
    }

    pub fn rounds(mut self) -> ClusterParams {
        self.mode = ClusterMode::Rounds;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterInfo {
    pub center: VertexId,
    pub size: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Clustering {
    pub shifts: Vec<Shift>,
    /// Center assignment `c(v)`; `c(c(v)) == c(v)`.
    pub center: Vec<VertexId>,
    /// Spanning-forest parent of each non-center vertex: `(parent, edge id)`.
    pub parent: Vec<Option<(VertexId, EdgeId)>>,
    /// Index of each vertex's cluster in `clusters`.
    pub cluster_of: Vec<u32>,
    /// Clusters ordered by center id.
    pub clusters: Vec<ClusterInfo>,
    /// Frontier rounds (rounds mode only).
    pub round_count: Option<u64>,
}

impl Clustering {
    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn members(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.clusters.len()];
        for (v, &c) in self.cluster_of.iter().enumerate() {
            out[c as usize].push(v as VertexId);
        }
        out
    }

    /// Edges whose endpoints land in different clusters.
    pub fn cut_edges(&self, g: &Graph) -> Vec<EdgeId> {
        g.edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| self.center[e.u as usize] != self.center[e.v as usize])
            .map(|(i, _)| i as EdgeId)
            .collect()
    }
}

/// `n` independent draws from `Exp(beta)` (mean `1/beta`), quantized to fixed
/// point. Reproducible from the seed.
pub fn sample_shifts(n: usize, beta: f64, seed: u64) -> Vec<Shift> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let exp = Exp::new(beta).expect("beta must be positive and finite");
    (0..n).map(|_| Shift::from_f64(exp.sample(&mut rng))).collect()
}

pub fn est_cluster(g: &Graph, p: &ClusterParams) -> Result<Clustering> {
    if !(p.beta > 0.0 && p.beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in (0,1), got {}",
            p.beta
        )));
    }
    if p.k_prime < 1.0 {
        return Err(Error::InvalidParameter("k_prime must be >= 1".into()));
    }
    let shifts = sample_shifts(g.vertex_count(), p.beta, p.seed);
    est_cluster_with_shifts(g, &shifts, p.mode)
}

/// Injection hook: cluster with explicitly supplied shifts.
pub fn est_cluster_with_shifts(g: &Graph, shifts: &[Shift], mode: ClusterMode) -> Result<Clustering> {
    assert_eq!(shifts.len(), g.vertex_count(), "one shift per vertex");
    match mode {
        ClusterMode::Exact => Ok(cluster_exact(g, shifts)),
        ClusterMode::Rounds => cluster_rounds(g, shifts),
    }
}

/// Candidate label during the super-source search; full lexicographic order
/// makes the output independent of scheduling.
type Cand = (u128, VertexId, VertexId, EdgeId); // (key, center, parent, edge)

fn supersource_tree(
    g: &Graph,
    start: impl Fn(VertexId) -> u128,
    edge_len: impl Fn(EdgeId) -> u128,
) -> (Vec<Cand>, u128) {
    let n = g.vertex_count();
    let mut best: Vec<Cand> = (0..n as u32)
        .map(|v| (start(v), v, NO_VERTEX, EdgeId::MAX))
        .collect();
    let mut settled = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(u128, VertexId, VertexId)>> = (0..n as u32)
        .map(|v| Reverse((start(v), v, v)))
        .collect();
    let mut max_key = 0u128;
    while let Some(Reverse((key, center, v))) = heap.pop() {
        let vi = v as usize;
        if settled[vi] || (key, center) != (best[vi].0, best[vi].1) {
            continue;
        }
        settled[vi] = true;
        max_key = max_key.max(key);
        for &(w, e) in g.adj(v) {
            let wi = w as usize;
            if settled[wi] {
                continue;
            }
            let cand: Cand = (key + edge_len(e), center, v, e);
            if cand < best[wi] {
                let push = (cand.0, cand.1) < (best[wi].0, best[wi].1);
                best[wi] = cand;
                if push {
                    heap.push(Reverse((cand.0, cand.1, w)));
                }
            }
        }
    }
    (best, max_key)
}

fn finish(g: &Graph, shifts: &[Shift], best: Vec<Cand>, round_count: Option<u64>) -> Clustering {
    let n = g.vertex_count();
    let mut center = vec![0u32; n];
    let mut parent = vec![None; n];
    for (v, &(_, c, par, e)) in best.iter().enumerate() {
        center[v] = c;
        if par != NO_VERTEX {
            parent[v] = Some((par, e));
        }
    }
    let mut centers: Vec<u32> = center.clone();
    centers.sort_unstable();
    centers.dedup();
    let mut clusters: Vec<ClusterInfo> = centers
        .iter()
        .map(|&c| ClusterInfo { center: c, size: 0 })
        .collect();
    let mut index_of_center = vec![NO_VERTEX; n];
    for (i, &c) in centers.iter().enumerate() {
        index_of_center[c as usize] = i as u32;
    }
    let mut cluster_of = vec![0u32; n];
    for v in 0..n {
        let idx = index_of_center[center[v] as usize];
        cluster_of[v] = idx;
        clusters[idx as usize].size += 1;
    }
    Clustering {
        shifts: shifts.to_vec(),
        center,
        parent,
        cluster_of,
        clusters,
        round_count,
    }
}

fn cluster_exact(g: &Graph, shifts: &[Shift]) -> Clustering {
    if g.vertex_count() == 0 {
        return finish(g, shifts, Vec::new(), None);
    }
    let dmax = shifts.iter().copied().max().unwrap().0;
    let scale = g.scale() as u128;
    // Key unit: 1 / (scale << 32). Start lengths carry the shift remainder,
    // graph edges carry their numerator.
    let (best, _) = supersource_tree(
        g,
        |v| (dmax - shifts[v as usize].0) as u128 * scale,
        |e| (g.weight_num(e) as u128) << SHIFT_FRAC_BITS,
    );
    finish(g, shifts, best, None)
}

fn cluster_rounds(g: &Graph, shifts: &[Shift]) -> Result<Clustering> {
    if !g.has_integer_weights() {
        return Err(Error::InvalidParameter(
            "rounds mode requires integer edge weights".into(),
        ));
    }
    if g.vertex_count() == 0 {
        return finish_empty(g, shifts);
    }
    let dmax = shifts.iter().map(|s| s.floor()).max().unwrap();
    let (best, max_key) = supersource_tree(
        g,
        |v| (dmax - shifts[v as usize].floor()) as u128,
        |e| g.integer_weight(e) as u128,
    );
    Ok(finish(g, shifts, best, Some(max_key as u64)))
}

fn finish_empty(g: &Graph, shifts: &[Shift]) -> Result<Clustering> {
    Ok(finish(g, shifts, Vec::new(), Some(0)))
}

/// Exact per-cluster tree statistics plus the cut-edge set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterTreeStats {
    pub center: VertexId,
    pub size: u32,
    /// Max weighted depth below the center (numerator units).
    pub radius_num: u128,
    /// Weighted diameter of the spanning tree (numerator units).
    pub diameter_num: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterStats {
    pub scale: u64,
    pub per_cluster: Vec<ClusterTreeStats>,
    pub cut_edges: Vec<EdgeId>,
    pub boundary_vertex_count: u32,
}

impl ClusterStats {
    pub fn max_tree_diameter_num(&self) -> u128 {
        self.per_cluster
            .iter()
            .map(|c| c.diameter_num)
            .max()
            .unwrap_or(0)
    }

    pub fn max_tree_diameter(&self) -> Rat {
        Ratio::new(self.max_tree_diameter_num().max(0), self.scale as u128)
    }
}

pub fn cluster_diagnostics(g: &Graph, c: &Clustering) -> ClusterStats {
    let n = g.vertex_count();
    // Tree adjacency from parent pointers.
    let mut tree: Vec<Vec<(VertexId, u64)>> = vec![Vec::new(); n];
    for v in 0..n {
        if let Some((p, e)) = c.parent[v] {
            let w = g.weight_num(e);
            tree[v].push((p, w));
            tree[p as usize].push((v as u32, w));
        }
    }
    let members = c.members();
    let mut per_cluster = Vec::with_capacity(c.clusters.len());
    for (ci, info) in c.clusters.iter().enumerate() {
        let (far, radius) = tree_farthest(&tree, info.center);
        let (_, diameter) = tree_farthest(&tree, far);
        debug_assert!(members[ci].contains(&info.center));
        per_cluster.push(ClusterTreeStats {
            center: info.center,
            size: info.size,
            radius_num: radius,
            diameter_num: diameter,
        });
    }
    let cut_edges = c.cut_edges(g);
    let mut boundary = vec![false; n];
    for &e in &cut_edges {
        let edge = g.edge(e);
        boundary[edge.u as usize] = true;
        boundary[edge.v as usize] = true;
    }
    ClusterStats {
        scale: g.scale(),
        per_cluster,
        cut_edges,
        boundary_vertex_count: boundary.iter().filter(|&&b| b).count() as u32,
    }
}

/// Farthest vertex and its weighted distance within one tree component.
fn tree_farthest(tree: &[Vec<(VertexId, u64)>], root: VertexId) -> (VertexId, u128) {
    let mut best = (root, 0u128);
    let mut stack = vec![(root, NO_VERTEX, 0u128)];
    while let Some((v, from, d)) = stack.pop() {
        if d > best.1 || (d == best.1 && v < best.0) {
            best = (v, d);
        }
        for &(w, len) in &tree[v as usize] {
            if w != from {
                stack.push((w, v, d + len as u128));
            }
        }
    }
    best
}

/// Where a ball is centered for the intersection diagnostics.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum BallCenter {
    Vertex(VertexId),
    EdgeMidpoint(EdgeId),
}

/// Number of distinct clusters intersecting the ball of radius `r` (weight
/// units) around the given center. Exact rational comparison throughout.
pub fn ball_cluster_count(g: &Graph, c: &Clustering, center: BallCenter, r: Frac) -> usize {
    let scale = g.scale() as u128;
    let rn = r.num as u128;
    let rd = r.den as u128;
    // Work with doubled distances so edge midpoints stay integral.
    let dist2: Vec<u128> = match center {
        BallCenter::Vertex(v) => dijkstra(g, v).dist.iter().map(|&d| d.saturating_mul(2)).collect(),
        BallCenter::EdgeMidpoint(e) => {
            let edge = g.edge(e);
            let du = dijkstra(g, edge.u).dist;
            let dv = dijkstra(g, edge.v).dist;
            du.iter()
                .zip(&dv)
                .map(|(&a, &b)| {
                    let w = edge.w as u128;
                    a.saturating_mul(2)
                        .saturating_add(w)
                        .min(b.saturating_mul(2).saturating_add(w))
                })
                .collect()
        }
    };
    let mut seen = std::collections::BTreeSet::new();
    for (v, &d2) in dist2.iter().enumerate() {
        if d2 == u128::MAX {
            continue;
        }
        // d2 / (2*scale) <= rn/rd  <=>  d2 * rd <= 2 * rn * scale
        if d2.saturating_mul(rd) <= 2 * rn * scale {
            seen.insert(c.center[v]);
        }
    }
    seen.len()
}
