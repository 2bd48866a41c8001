//! Hopsets: shortcut edges that shrink the hop count of approximately
//! shortest paths.
//!
//! The core build recursively clusters the graph with a geometrically
//! escalating rate. Clusters holding at least a `1/rho` fraction of the
//! current subgraph are "large": each contributes a star (center to every
//! member, weighted by exact distance) and all large-cluster centers are
//! joined into a clique, with all distances computed inside the current
//! recursion subgraph. Only small clusters are recursed on, except at the
//! top level where every cluster is. Every shortcut records the subgraph
//! that witnessed it, so its weight can be re-verified as an exact distance.

mod decomposition;
mod lowdepth;
mod oracle;
mod rounding;

pub use decomposition::{
    map_query, weight_decomposition, CategoryInfo, DecompLevel, QueryGraph, QueryLoc,
    WeightDecomposition,
};
pub use lowdepth::{low_depth_hopset, LowDepthHopset, LowDepthRound, LowDepthScale};
pub use oracle::{build_oracle, query_oracle, Bundle, OracleIndex, OracleParams, QueryAnswer};
pub use rounding::{round_weights, RoundedGraph};

use crate::cluster::{est_cluster, ClusterMode, ClusterParams};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::sssp::weighted_bfs;
use crate::util::child_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShortcutKind {
    Star,
    Clique,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortcut {
    pub u: VertexId,
    pub v: VertexId,
    /// Exact distance between `u` and `v` inside the witness subgraph, in the
    /// build graph's integer weight units.
    pub w: u64,
    pub kind: ShortcutKind,
    pub level: u32,
    /// Index into `Hopset::witnesses`.
    pub witness: u32,
}

/// Vertex set (original ids) of one recursion subgraph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessSubgraph {
    pub vertices: Vec<VertexId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopsetLevel {
    pub level: u32,
    /// Requested rate at this level (before capping).
    pub beta_requested: f64,
    /// Effective rate after the `(0,1)` cap.
    pub beta: f64,
    pub subgraphs: u32,
    pub clusters: u64,
    pub large_clusters: u64,
    pub star_edges: u64,
    pub clique_edges: u64,
    /// Largest star edge weight at this level (= max large-cluster radius).
    pub max_star_weight: u64,
    /// Deepest frontier any center search ran at this level.
    pub max_bfs_rounds: u64,
}

/// Parameters of the recursive build. `epsilon_prime` is the user-facing
/// distortion knob; internally the build uses `eps = epsilon_prime / ln n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopsetParams {
    pub epsilon_prime: f64,
    /// Exponent of the large-cluster threshold `rho`.
    pub delta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Confidence constant in the rate escalation.
    pub k_conf: f64,
    pub repetitions: u32,
    pub seed: u64,
    /// Overrides `n^gamma1`.
    pub n_final: Option<u64>,
    /// Overrides the top-level rate `n^-gamma2`.
    pub beta0: Option<f64>,
    /// Rates are capped strictly below 1.
    pub beta_cap: f64,
    /// Markov slack on the predicted hop budget (and distortion).
    pub h_slack: f64,
}

impl HopsetParams {
    pub fn new(epsilon_prime: f64, delta: f64, gamma1: f64, gamma2: f64, seed: u64) -> HopsetParams {
        HopsetParams {
            epsilon_prime,
            delta,
            gamma1,
            gamma2,
            k_conf: 2.0,
            repetitions: 3,
            seed,
            n_final: None,
            beta0: None,
            beta_cap: 0.99,
            h_slack: 4.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        if !(self.epsilon_prime > 0.0 && self.epsilon_prime < 1.0) {
            return bad("epsilon_prime must lie in (0,1)");
        }
        if self.delta <= 1.0 {
            return bad("delta must exceed 1");
        }
        if !(0.0 < self.gamma1 && self.gamma1 < self.gamma2 && self.gamma2 < 1.0) {
            return bad("need 0 < gamma1 < gamma2 < 1");
        }
        if self.repetitions < 1 {
            return bad("repetitions must be >= 1");
        }
        if self.k_conf < 1.0 {
            return bad("k_conf must be >= 1");
        }
        if let Some(nf) = self.n_final {
            if nf < 2 {
                return bad("n_final must be >= 2");
            }
        }
        Ok(())
    }

    /// Resolve the derived quantities for a graph with `n` vertices.
    pub fn derive(&self, n: usize) -> Result<DerivedParams> {
        self.validate()?;
        let nf = n.max(2) as f64;
        let ln_n = nf.ln();
        let eps = self.epsilon_prime / ln_n;
        let escalation = self.k_conf * ln_n / eps;
        let rho = escalation.powf(self.delta);
        if !(rho > 1.0) {
            return Err(Error::InvalidParameter("rho must exceed 1".into()));
        }
        let n_final = self
            .n_final
            .unwrap_or_else(|| nf.powf(self.gamma1).ceil() as u64)
            .max(2);
        let beta0 = self.beta0.unwrap_or_else(|| nf.powf(-self.gamma2));
        if !(beta0 > 0.0) {
            return Err(Error::InvalidParameter("beta0 must be positive".into()));
        }
        // Per-distance hop budget: h(d) = slack * n^(1/delta) *
        // n_final^(1-1/delta) * beta0 * d.
        let hop_factor =
            self.h_slack * nf.powf(1.0 / self.delta) * (n_final as f64).powf(1.0 - 1.0 / self.delta)
                * beta0;
        Ok(DerivedParams {
            eps,
            escalation,
            rho,
            n_final,
            beta0,
            hop_factor,
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Internal distortion `epsilon_prime / ln n`.
    pub eps: f64,
    /// Rate multiplier between recursion levels: `k_conf * ln(n) / eps`.
    pub escalation: f64,
    /// Large-cluster threshold exponent: `escalation^delta`.
    pub rho: f64,
    pub n_final: u64,
    pub beta0: f64,
    /// `h_slack * n^(1/delta) * n_final^(1-1/delta) * beta0`.
    pub hop_factor: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hopset {
    pub shortcuts: Vec<Shortcut>,
    pub witnesses: Vec<WitnessSubgraph>,
    pub levels: Vec<HopsetLevel>,
    /// Hop budget for the worst-case distance in the build graph.
    pub predicted_h: u64,
    pub derived: DerivedParams,
    pub n: u32,
    pub graph_fingerprint: u64,
}

impl Hopset {
    pub fn star_count(&self) -> u64 {
        self.shortcuts
            .iter()
            .filter(|s| s.kind == ShortcutKind::Star)
            .count() as u64
    }

    pub fn clique_count(&self) -> u64 {
        self.shortcuts
            .iter()
            .filter(|s| s.kind == ShortcutKind::Clique)
            .count() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.shortcuts.is_empty()
    }

    pub fn edge_tuples(&self) -> Vec<(VertexId, VertexId, u64)> {
        self.shortcuts.iter().map(|s| (s.u, s.v, s.w)).collect()
    }

    /// Hop budget for a query at distance `d` (build-graph units).
    pub fn h_for_distance(&self, d: u128) -> u64 {
        let h = (self.derived.hop_factor * d as f64).ceil();
        if h >= u64::MAX as f64 {
            u64::MAX
        } else {
            (h as u64).max(1)
        }
    }

    /// Measured relative distortion budget: the Markov slack times the
    /// per-level contribution `4 * beta(level-1) * max star radius(level)`,
    /// summed over shortcut levels.
    pub fn eps_total(&self, h_slack: f64) -> f64 {
        let beta_of: BTreeMap<u32, f64> =
            self.levels.iter().map(|l| (l.level, l.beta)).collect();
        let mut sum = 0.0;
        for l in &self.levels {
            if l.level == 0 || l.star_edges == 0 {
                continue;
            }
            if let Some(prev_beta) = beta_of.get(&(l.level - 1)) {
                sum += prev_beta * 4.0 * l.max_star_weight as f64;
            }
        }
        h_slack * sum
    }
}

/// Recursive hopset construction on an integer-weight graph.
pub fn hopset_build(g: &Graph, p: &HopsetParams) -> Result<Hopset> {
    if g.scale() != 1 {
        return Err(Error::InvalidParameter(
            "hopset_build requires integer weights (unweighted or rounded)".into(),
        ));
    }
    let derived = p.derive(g.vertex_count())?;
    let mut b = Builder {
        params: p.clone(),
        derived,
        shortcuts: Vec::new(),
        witnesses: Vec::new(),
        levels: BTreeMap::new(),
    };
    let to_orig: Vec<VertexId> = (0..g.n()).collect();
    b.recurse(g.clone(), to_orig, 0, derived.beta0, p.seed)?;
    let max_dist = (g.vertex_count().saturating_sub(1) as u128)
        .saturating_mul(g.max_weight_num().max(1) as u128);
    let predicted_h = {
        let h = (derived.hop_factor * max_dist as f64).ceil();
        if h >= u64::MAX as f64 {
            u64::MAX
        } else {
            (h as u64).max(1)
        }
    };
    Ok(Hopset {
        shortcuts: b.shortcuts,
        witnesses: b.witnesses,
        levels: b.levels.into_values().collect(),
        predicted_h,
        derived,
        n: g.n(),
        graph_fingerprint: g.fingerprint(),
    })
}

struct Builder {
    params: HopsetParams,
    derived: DerivedParams,
    shortcuts: Vec<Shortcut>,
    witnesses: Vec<WitnessSubgraph>,
    levels: BTreeMap<u32, HopsetLevel>,
}

impl Builder {
    fn level_entry(&mut self, level: u32, requested: f64, effective: f64) -> &mut HopsetLevel {
        self.levels.entry(level).or_insert(HopsetLevel {
            level,
            beta_requested: requested,
            beta: effective,
            subgraphs: 0,
            clusters: 0,
            large_clusters: 0,
            star_edges: 0,
            clique_edges: 0,
            max_star_weight: 0,
            max_bfs_rounds: 0,
        })
    }

    fn recurse(
        &mut self,
        sub: Graph,
        to_orig: Vec<VertexId>,
        level: u32,
        beta_req: f64,
        seed: u64,
    ) -> Result<()> {
        if (sub.vertex_count() as u64) <= self.derived.n_final {
            return Ok(());
        }
        let beta = beta_req.min(self.params.beta_cap);
        let clustering = est_cluster(
            &sub,
            &ClusterParams {
                beta,
                k_prime: self.params.k_conf.max(1.0),
                seed,
                mode: ClusterMode::Exact,
            },
        )?;
        let members = clustering.members();
        {
            let entry = self.level_entry(level, beta_req, beta);
            entry.subgraphs += 1;
            entry.clusters += members.len() as u64;
        }
        let next_beta = beta_req * self.derived.escalation;

        if level == 0 {
            for (i, (child, child_orig)) in
                partition_by_cluster(&sub, &clustering, &to_orig, &members)
                    .into_iter()
                    .enumerate()
            {
                self.recurse(child, child_orig, level + 1, next_beta, child_seed(seed, i as u64))?;
            }
            return Ok(());
        }

        let threshold = sub.vertex_count() as f64 / self.derived.rho;
        let large: Vec<usize> = (0..members.len())
            .filter(|&i| members[i].len() as f64 >= threshold)
            .collect();
        if !large.is_empty() {
            let witness_id = self.witnesses.len() as u32;
            self.witnesses.push(WitnessSubgraph {
                vertices: to_orig.clone(),
            });
            // One search per large-cluster center over the whole current
            // subgraph; serves both the stars and the center clique.
            let centers: Vec<VertexId> =
                large.iter().map(|&i| clustering.clusters[i].center).collect();
            let searches: Vec<_> = centers
                .par_iter()
                .map(|&c| weighted_bfs(&sub, &[c]))
                .collect();
            let mut stars = 0u64;
            let mut cliques = 0u64;
            let mut max_star = 0u64;
            let mut max_rounds = 0u64;
            for (pos, &ci) in large.iter().enumerate() {
                let center = centers[pos];
                let res = &searches[pos];
                max_rounds = max_rounds.max(res.rounds);
                for &v in &members[ci] {
                    if v == center {
                        continue;
                    }
                    let d = res.distance(v).expect("cluster member reachable from center");
                    let w = u64::try_from(d).map_err(|_| Error::Overflow("star weight"))?;
                    max_star = max_star.max(w);
                    stars += 1;
                    self.shortcuts.push(Shortcut {
                        u: to_orig[center as usize],
                        v: to_orig[v as usize],
                        w,
                        kind: ShortcutKind::Star,
                        level,
                        witness: witness_id,
                    });
                }
                for other in (pos + 1)..centers.len() {
                    let c2 = centers[other];
                    if let Some(d) = res.distance(c2) {
                        let w = u64::try_from(d).map_err(|_| Error::Overflow("clique weight"))?;
                        cliques += 1;
                        self.shortcuts.push(Shortcut {
                            u: to_orig[center as usize],
                            v: to_orig[c2 as usize],
                            w,
                            kind: ShortcutKind::Clique,
                            level,
                            witness: witness_id,
                        });
                    }
                }
            }
            let entry = self.level_entry(level, beta_req, beta);
            entry.large_clusters += large.len() as u64;
            entry.star_edges += stars;
            entry.clique_edges += cliques;
            entry.max_star_weight = entry.max_star_weight.max(max_star);
            entry.max_bfs_rounds = entry.max_bfs_rounds.max(max_rounds);
        }
        for (i, (child, child_orig)) in partition_by_cluster(&sub, &clustering, &to_orig, &members)
            .into_iter()
            .enumerate()
        {
            if large.binary_search(&i).is_ok() {
                continue;
            }
            self.recurse(child, child_orig, level + 1, next_beta, child_seed(seed, i as u64))?;
        }
        Ok(())
    }
}

/// All cluster-induced subgraphs in one pass over the edges, with vertex
/// labels mapped through to the build's original ids.
fn partition_by_cluster(
    sub: &Graph,
    clustering: &crate::cluster::Clustering,
    to_orig: &[VertexId],
    members: &[Vec<VertexId>],
) -> Vec<(Graph, Vec<VertexId>)> {
    use crate::graph::Edge;
    let n = sub.vertex_count();
    // Rank of each vertex inside its (sorted) cluster member list.
    let mut rank = vec![0u32; n];
    for m in members {
        for (r, &v) in m.iter().enumerate() {
            rank[v as usize] = r as u32;
        }
    }
    let mut edge_lists: Vec<Vec<Edge>> = vec![Vec::new(); members.len()];
    for e in sub.edges() {
        let cu = clustering.cluster_of[e.u as usize];
        if cu == clustering.cluster_of[e.v as usize] {
            let (a, b) = (rank[e.u as usize], rank[e.v as usize]);
            edge_lists[cu as usize].push(Edge {
                u: a.min(b),
                v: a.max(b),
                w: e.w,
            });
        }
    }
    members
        .iter()
        .zip(edge_lists)
        .map(|(m, edges)| {
            let child = Graph::assemble(m.len() as u32, sub.scale(), edges);
            let child_orig: Vec<VertexId> =
                m.iter().map(|&v| to_orig[v as usize]).collect();
            (child, child_orig)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, Graph};
    use crate::sssp::dijkstra;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    pub(crate) fn gnm(rng: &mut ChaCha12Rng, n: u32, m: usize) -> Graph {
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < m {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                seen.insert((u.min(v), u.max(v)));
            }
        }
        let edges: Vec<(u32, u32, u64)> = seen.into_iter().map(|(u, v)| (u, v, 1)).collect();
        build_graph(&edges, n).unwrap()
    }

    /// Grouped witness check: one Dijkstra per (witness, source) pair proves
    /// every shortcut weight is the exact distance inside its witness.
    pub(crate) fn check_witness_exactness(g: &Graph, hs: &Hopset) {
        use std::collections::BTreeMap;
        let mut groups: BTreeMap<(u32, VertexId), Vec<usize>> = BTreeMap::new();
        for (i, s) in hs.shortcuts.iter().enumerate() {
            groups.entry((s.witness, s.u)).or_default().push(i);
        }
        for ((wid, src), items) in groups {
            let wit = &hs.witnesses[wid as usize];
            let (sub, map) = g.induced_subgraph(&wit.vertices).unwrap();
            let d = dijkstra(&sub, map.to_sub[src as usize]);
            for i in items {
                let s = &hs.shortcuts[i];
                let sv = map.to_sub[s.v as usize];
                assert_eq!(
                    d.distance(sv),
                    Some(s.w as u128),
                    "shortcut weight must equal its witness distance"
                );
            }
        }
    }

    fn params(seed: u64) -> HopsetParams {
        HopsetParams::new(0.5, 1.5, 0.3, 0.6, seed)
    }

    #[test]
    fn base_case_yields_empty_hopset() {
        let g = build_graph(&[(0, 1, 1), (1, 2, 1)], 3).unwrap();
        let mut p = params(1);
        p.n_final = Some(10);
        let hs = hopset_build(&g, &p).unwrap();
        assert!(hs.is_empty());
        assert!(hs.levels.is_empty());
    }

    #[test]
    fn single_large_cluster_means_stars_only() {
        // A star graph with a tiny top-level rate clusters into one piece at
        // level 0 (recursed as the first call) and again at level 1, where a
        // single large cluster has no clique partner.
        let edges: Vec<(u32, u32, u64)> = (1..12u32).map(|v| (0, v, 1)).collect();
        let g = build_graph(&edges, 12).unwrap();
        let mut p = params(2);
        p.n_final = Some(2);
        p.beta0 = Some(1e-6);
        for seed in 0..20 {
            p.seed = seed;
            let hs = hopset_build(&g, &p).unwrap();
            if hs.levels.iter().any(|l| l.large_clusters == 1 && l.star_edges > 0) {
                let lvl = hs
                    .levels
                    .iter()
                    .find(|l| l.large_clusters == 1 && l.star_edges > 0)
                    .unwrap();
                assert_eq!(lvl.clique_edges, 0, "one center has no clique partner");
                check_witness_exactness(&g, &hs);
                return;
            }
        }
        panic!("no seed produced a lone large cluster");
    }

    #[test]
    fn size_bounds_hold_exactly() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let g = gnm(&mut rng, 400, 1200);
        for seed in 0..5 {
            let hs = hopset_build(&g, &params(seed)).unwrap();
            let n = g.vertex_count() as f64;
            assert!(hs.star_count() <= g.vertex_count() as u64);
            let clique_bound = (n / hs.derived.n_final as f64) * hs.derived.rho * hs.derived.rho;
            assert!((hs.clique_count() as f64) <= clique_bound);
        }
    }

    #[test]
    fn witness_exactness_random_graph() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let g = gnm(&mut rng, 300, 900);
        let hs = hopset_build(&g, &params(3)).unwrap();
        assert!(!hs.is_empty(), "expected shortcuts at this scale");
        check_witness_exactness(&g, &hs);
    }

    #[test]
    fn shortcuts_never_underestimate() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let g = gnm(&mut rng, 200, 600);
        let hs = hopset_build(&g, &params(7)).unwrap();
        // Witness distances dominate global distances.
        let mut cache: std::collections::BTreeMap<VertexId, Vec<u128>> = Default::default();
        for s in &hs.shortcuts {
            let d = cache
                .entry(s.u)
                .or_insert_with(|| dijkstra(&g, s.u).dist)[s.v as usize];
            assert!(s.w as u128 >= d);
        }
    }

    #[test]
    fn beta_schedule_is_geometric() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let g = gnm(&mut rng, 500, 1500);
        let hs = hopset_build(&g, &params(1)).unwrap();
        let esc = hs.derived.escalation;
        for l in &hs.levels {
            let expect = hs.derived.beta0 * esc.powi(l.level as i32);
            let rel = (l.beta_requested - expect).abs() / expect;
            assert!(rel < 1e-9, "level {} requested {} expected {}", l.level, l.beta_requested, expect);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        let g = gnm(&mut rng, 300, 800);
        let a = hopset_build(&g, &params(4)).unwrap();
        let b = hopset_build(&g, &params(4)).unwrap();
        assert_eq!(a.shortcuts, b.shortcuts);
    }
}
