//! Distance engines.
//!
//! * [`bfs`] — hop distances on unit-weight graphs (oracle for unweighted
//!   runs; rounds = frontier count).
//! * [`dijkstra`] — exact distances for arbitrary weights; the reference
//!   oracle everywhere.
//! * [`weighted_bfs`] — distances on integer-weight graphs, with the round
//!   count defined as the largest finite distance reached (the unit-step
//!   frontier depth proxy).
//! * [`RelaxEngine`] / [`hop_limited_distance`] — synchronized Bellman-Ford
//!   rounds over graph edges plus hopset shortcuts; `h` rounds compute the
//!   minimum weight over paths with at most `h` edges.
//!
//! All distances are numerators over the graph's weight scale, held in
//! `u128`; `UNREACHABLE` is an explicit sentinel distinct from any distance.

use crate::graph::{Graph, VertexId, NO_VERTEX};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

pub const UNREACHABLE: u128 = u128::MAX;

#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub sources: Vec<VertexId>,
    /// Distance numerators; `UNREACHABLE` when there is no path.
    pub dist: Vec<u128>,
    /// Predecessor on a shortest path (`NO_VERTEX` for sources/unreached).
    pub parent: Vec<VertexId>,
    /// Depth proxy: frontier rounds (bfs/weighted_bfs) or 0 (dijkstra).
    pub rounds: u64,
    /// Work proxy: successful relaxations.
    pub relaxations: u64,
}

impl DistanceResult {
    pub fn distance(&self, v: VertexId) -> Option<u128> {
        match self.dist[v as usize] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }
}

/// Hop distances from `source`; requires unit weights.
pub fn bfs(g: &Graph, source: VertexId) -> DistanceResult {
    assert!(g.is_unweighted(), "bfs requires a unit-weight graph");
    let n = g.vertex_count();
    let mut dist = vec![UNREACHABLE; n];
    let mut parent = vec![NO_VERTEX; n];
    let mut frontier = vec![source];
    dist[source as usize] = 0;
    let mut rounds = 0u64;
    let mut relaxations = 0u64;
    let mut next = Vec::new();
    while !frontier.is_empty() {
        next.clear();
        for &v in &frontier {
            let d = dist[v as usize];
            for &(w, _) in g.adj(v) {
                if dist[w as usize] == UNREACHABLE {
                    dist[w as usize] = d + 1;
                    parent[w as usize] = v;
                    relaxations += 1;
                    next.push(w);
                }
            }
        }
        std::mem::swap(&mut frontier, &mut next);
        if !frontier.is_empty() {
            rounds += 1;
        }
    }
    DistanceResult {
        sources: vec![source],
        dist,
        parent,
        rounds,
        relaxations,
    }
}

/// Exact shortest-path distances from `sources` (numerator units).
pub fn dijkstra_from(g: &Graph, sources: &[VertexId]) -> DistanceResult {
    let n = g.vertex_count();
    let mut dist = vec![UNREACHABLE; n];
    let mut parent = vec![NO_VERTEX; n];
    let mut heap: BinaryHeap<Reverse<(u128, VertexId)>> = BinaryHeap::new();
    let mut relaxations = 0u64;
    for &s in sources {
        if dist[s as usize] != 0 {
            dist[s as usize] = 0;
            heap.push(Reverse((0, s)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        for &(w, e) in g.adj(v) {
            let nd = d + g.weight_num(e) as u128;
            if nd < dist[w as usize] {
                dist[w as usize] = nd;
                parent[w as usize] = v;
                relaxations += 1;
                heap.push(Reverse((nd, w)));
            }
        }
    }
    DistanceResult {
        sources: sources.to_vec(),
        dist,
        parent,
        rounds: 0,
        relaxations,
    }
}

pub fn dijkstra(g: &Graph, source: VertexId) -> DistanceResult {
    dijkstra_from(g, &[source])
}

/// Multi-source distances on an integer-weight graph (scale 1). The round
/// count equals the maximum finite distance reached: one unit-granularity
/// frontier step per distance value.
pub fn weighted_bfs(g: &Graph, sources: &[VertexId]) -> DistanceResult {
    assert_eq!(g.scale(), 1, "weighted_bfs requires integer weights");
    let mut res = dijkstra_from(g, sources);
    res.rounds = res
        .dist
        .iter()
        .filter(|&&d| d != UNREACHABLE)
        .max()
        .map(|&d| d as u64)
        .unwrap_or(0);
    res
}

/// Outcome of a bounded relaxation run.
#[derive(Debug, Clone)]
pub struct HopRun {
    pub dist: Vec<u128>,
    /// Rounds actually executed (stops early once a round changes nothing).
    pub rounds: u64,
    pub relaxations: u64,
    /// True when the run reached a fixed point before exhausting the budget,
    /// i.e. the result equals the unbounded shortest-path distances.
    pub converged: bool,
}

impl HopRun {
    pub fn distance(&self, v: VertexId) -> Option<u128> {
        match self.dist[v as usize] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }
}

/// Synchronized edge-relaxation engine over `E ∪ E'`.
///
/// Rounds are double-buffered: round `r` relaxes only values computed in
/// rounds `< r`, so after `h` rounds `dist[v]` is exactly the minimum weight
/// over paths with at most `h` edges. The shortcut weights must be in the
/// same numerator units as the graph.
#[derive(Debug, Clone)]
pub struct RelaxEngine {
    n: usize,
    offsets: Vec<u32>,
    targets: Vec<VertexId>,
    weights: Vec<u64>,
}

impl RelaxEngine {
    pub fn new(g: &Graph, extra: &[(VertexId, VertexId, u64)]) -> RelaxEngine {
        let n = g.vertex_count();
        let mut deg = vec![0u32; n];
        for e in g.edges() {
            deg[e.u as usize] += 1;
            deg[e.v as usize] += 1;
        }
        for &(u, v, _) in extra {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let total = offsets[n] as usize;
        let mut targets = vec![0u32; total];
        let mut weights = vec![0u64; total];
        let mut cursor = offsets.clone();
        let mut push = |u: u32, v: u32, w: u64| {
            let c = cursor[u as usize] as usize;
            targets[c] = v;
            weights[c] = w;
            cursor[u as usize] += 1;
        };
        for e in g.edges() {
            push(e.u, e.v, e.w);
            push(e.v, e.u, e.w);
        }
        for &(u, v, w) in extra {
            push(u, v, w);
            push(v, u, w);
        }
        RelaxEngine {
            n,
            offsets,
            targets,
            weights,
        }
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = (VertexId, u64)> + '_ {
        let lo = self.offsets[v] as usize;
        let hi = self.offsets[v + 1] as usize;
        self.targets[lo..hi]
            .iter()
            .copied()
            .zip(self.weights[lo..hi].iter().copied())
    }

    /// Run at most `h` rounds from `source`.
    pub fn run(&self, source: VertexId, h: u64) -> HopRun {
        let mut run = self.start(source);
        let mut converged = false;
        let mut rounds = 0;
        while rounds < h {
            if !self.round(&mut run) {
                // A no-op round does not count against the budget.
                converged = true;
                break;
            }
            rounds += 1;
        }
        HopRun {
            dist: run.dist,
            rounds,
            relaxations: run.relaxations,
            converged,
        }
    }

    /// Smallest `h` with `dist^h(source, target) <= threshold`, up to `max_h`.
    pub fn rounds_until(
        &self,
        source: VertexId,
        target: VertexId,
        threshold: u128,
        max_h: u64,
    ) -> Option<u64> {
        let mut run = self.start(source);
        if run.dist[target as usize] <= threshold {
            return Some(0);
        }
        for h in 1..=max_h {
            if !self.round(&mut run) {
                return None;
            }
            if run.dist[target as usize] <= threshold {
                return Some(h);
            }
        }
        None
    }

    fn start(&self, source: VertexId) -> RoundState {
        let mut dist = vec![UNREACHABLE; self.n];
        dist[source as usize] = 0;
        RoundState {
            dist,
            frontier: vec![source],
            stamp: vec![0u32; self.n],
            round: 0,
            best_new: vec![UNREACHABLE; self.n],
            relaxations: 0,
        }
    }

    /// One synchronized round; returns false when nothing changed.
    fn round(&self, st: &mut RoundState) -> bool {
        st.round += 1;
        let mut touched: Vec<VertexId> = Vec::new();
        for fi in 0..st.frontier.len() {
            let u = st.frontier[fi];
            let du = st.dist[u as usize];
            for (v, w) in self.neighbors(u as usize) {
                let nd = du + w as u128;
                let vi = v as usize;
                if nd >= st.dist[vi] {
                    continue;
                }
                if st.stamp[vi] != st.round {
                    st.stamp[vi] = st.round;
                    st.best_new[vi] = nd;
                    touched.push(v);
                } else if nd < st.best_new[vi] {
                    st.best_new[vi] = nd;
                }
            }
        }
        st.frontier.clear();
        for &v in &touched {
            let vi = v as usize;
            if st.best_new[vi] < st.dist[vi] {
                st.dist[vi] = st.best_new[vi];
                st.relaxations += 1;
                st.frontier.push(v);
            }
        }
        st.frontier.sort_unstable();
        !st.frontier.is_empty()
    }
}

struct RoundState {
    dist: Vec<u128>,
    frontier: Vec<VertexId>,
    stamp: Vec<u32>,
    round: u32,
    best_new: Vec<u128>,
    relaxations: u64,
}

/// Minimum weight over `s`-`t` paths with at most `h` edges drawn from the
/// graph plus `extra` shortcut edges. Monotone non-increasing in `h`; equals
/// Dijkstra on the union once `h >= |V| - 1`.
pub fn hop_limited_distance(
    g: &Graph,
    extra: &[(VertexId, VertexId, u64)],
    s: VertexId,
    h: u64,
) -> HopRun {
    RelaxEngine::new(g, extra).run(s, h)
}
