//! `O(k)`-stretch spanners from one round of clustering per weight level.
//!
//! The unweighted construction clusters with `beta = ln(n) / 2k` and keeps
//! the cluster forest plus one edge from every boundary vertex to each
//! adjacent cluster. The weighted construction first splits the power-of-two
//! weight buckets into groups whose in-group buckets are separated by at
//! least `k^c`, then processes each group level by level, contracting the
//! forests built so far and clustering the quotient with uniform weights.
//!
//! Every level records its realized quotient cluster diameter and the maximum
//! diameter of the contracted components, so a per-run certified distance
//! bound is available for every spanner edge.

use crate::cluster::{cluster_diagnostics, est_cluster, ClusterParams};
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, Graph, Rat, VertexId, NO_VERTEX, UnionFind};
use crate::util::{derive_seed, Frac};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpannerParams {
    /// Stretch parameter `k >= 1`.
    pub k: u32,
    /// Bucket-spacing constant `c`; in-group buckets differ by >= `k^c`.
    pub c_spacing: u32,
    pub seed: u64,
}

impl SpannerParams {
    pub fn new(k: u32, seed: u64) -> SpannerParams {
        SpannerParams {
            k,
            c_spacing: 3,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeRole {
    Forest,
    InterCluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpannerEdge {
    pub edge: EdgeId,
    pub role: EdgeRole,
    pub group: u32,
    pub level: u32,
}

/// Per-level build record; enough to certify the stretch of that level's
/// edges after the fact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpannerLevel {
    pub group: u32,
    pub level: u32,
    pub quotient_vertices: u32,
    pub quotient_edges: u32,
    pub cluster_count: u32,
    /// Max cluster tree diameter in the quotient graph (hops).
    pub max_tree_diameter_hops: u64,
    /// Formal lower bound of this bucket's weight range.
    pub bucket_w_low: Frac,
    /// Realized max weight numerator within the bucket.
    pub bucket_w_max_num: u64,
    /// Max diameter (numerator units) of the contracted components going in.
    pub expanded_diameter_num: u128,
    /// Certified upper bound (numerator units) on the spanner distance
    /// between the endpoints of any edge of this bucket:
    /// `(2D+1) * w_max + (2D+2) * phi_prev`.
    pub cert_bound_num: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spanner {
    /// Selected edges with provenance, ordered by edge id.
    pub edges: Vec<SpannerEdge>,
    pub levels: Vec<SpannerLevel>,
    pub graph_fingerprint: u64,
    pub scale: u64,
}

impl Spanner {
    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.edge).collect()
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Subgraph of `g` spanned by the selected edges.
    pub fn subgraph(&self, g: &Graph) -> Result<Graph> {
        if g.fingerprint() != self.graph_fingerprint {
            return Err(Error::ArtifactMismatch);
        }
        g.subgraph_of_edges(&self.edge_ids())
    }

    /// Certified distance bound (numerator units) for the endpoints of
    /// `edge`, from the level that admitted it.
    pub fn cert_bound_for(&self, edge: EdgeId) -> Option<u128> {
        let se = self.edges.iter().find(|se| se.edge == edge)?;
        self.levels
            .iter()
            .find(|l| l.group == se.group && l.level == se.level)
            .map(|l| l.cert_bound_num)
    }

    /// Plain-text artifact form: one `edge u v role group level` line each.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for se in &self.edges {
            let e = g.edge(se.edge);
            let role = match se.role {
                EdgeRole::Forest => "forest",
                EdgeRole::InterCluster => "inter-cluster",
            };
            out.push_str(&format!(
                "{} {} {} {} {} {}\n",
                se.edge, e.u, e.v, role, se.group, se.level
            ));
        }
        out
    }
}

/// Clustering rate used by every spanner level: `ln(n) / 2k`, capped below 1.
pub fn spanner_beta(n: usize, k: u32) -> f64 {
    ((n.max(2) as f64).ln() / (2.0 * k as f64)).min(0.99)
}

/// One weight bucket handed to `well_separated_spanner`: edges with weights
/// in `[w_low, 2*w_low)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightBucket {
    pub w_low: Frac,
    pub edges: Vec<EdgeId>,
}

pub fn unweighted_spanner(g: &Graph, p: &SpannerParams) -> Result<Spanner> {
    if !g.is_unweighted() {
        return Err(Error::UseWeightedSpanner);
    }
    validate_params(p)?;
    let all: Vec<EdgeId> = (0..g.edge_count() as u32).collect();
    let bucket = WeightBucket {
        w_low: Frac::integer(1),
        edges: all,
    };
    build_well_separated(g, &[bucket], p, 0)
}

/// Spanner over explicitly bucketed well-separated weights.
pub fn well_separated_spanner(g: &Graph, buckets: &[WeightBucket], p: &SpannerParams) -> Result<Spanner> {
    validate_params(p)?;
    build_well_separated(g, buckets, p, 0)
}

/// Full weighted pipeline: power-of-two buckets, split into
/// `ceil(c * lg k)` well-separated groups, one pass per group.
pub fn weighted_spanner(g: &Graph, p: &SpannerParams) -> Result<Spanner> {
    validate_params(p)?;
    let buckets = g.bucket_edges(Frac::integer(2))?;
    let group_count = ((p.c_spacing as f64) * (p.k as f64).log2()).ceil().max(1.0) as i64;
    // Group j takes power-of-two buckets with index congruent to j.
    let mut groups: BTreeMap<i64, Vec<WeightBucket>> = BTreeMap::new();
    for (&idx, edges) in &buckets.buckets {
        let j = idx.rem_euclid(group_count);
        let w_low = pow2_frac(idx - 1)?;
        groups.entry(j).or_default().push(WeightBucket {
            w_low,
            edges: edges.clone(),
        });
    }
    let mut merged: BTreeMap<EdgeId, SpannerEdge> = BTreeMap::new();
    let mut levels = Vec::new();
    for (rank, (_, bucket_list)) in groups.into_iter().enumerate() {
        let sub = SpannerParams {
            seed: derive_seed(p.seed, rank as u64),
            ..p.clone()
        };
        let sp = build_well_separated(g, &bucket_list, &sub, rank as u32)?;
        for se in sp.edges {
            merged.insert(se.edge, se);
        }
        levels.extend(sp.levels);
    }
    Ok(Spanner {
        edges: merged.into_values().collect(),
        levels,
        graph_fingerprint: g.fingerprint(),
        scale: g.scale(),
    })
}

fn validate_params(p: &SpannerParams) -> Result<()> {
    if p.k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if p.c_spacing < 1 {
        return Err(Error::InvalidParameter("c_spacing must be >= 1".into()));
    }
    Ok(())
}

fn pow2_frac(e: i64) -> Result<Frac> {
    if e >= 0 {
        if e >= 64 {
            return Err(Error::Overflow("bucket bound"));
        }
        Ok(Frac::integer(1u64 << e))
    } else {
        if e <= -64 {
            return Err(Error::Overflow("bucket bound"));
        }
        Ok(Frac::new(1, 1u64 << (-e)))
    }
}

fn build_well_separated(
    g: &Graph,
    buckets: &[WeightBucket],
    p: &SpannerParams,
    group: u32,
) -> Result<Spanner> {
    validate_buckets(g, buckets, p)?;
    let n = g.vertex_count();
    let beta = spanner_beta(n, p.k);
    let mut uf = UnionFind::new(n);
    // Forest accumulated so far (original edge ids), for component diameters.
    let mut forest_adj: Vec<Vec<(VertexId, u64)>> = vec![Vec::new(); n];
    let mut picked: BTreeMap<EdgeId, SpannerEdge> = BTreeMap::new();
    let mut levels = Vec::new();

    for (li, bucket) in buckets.iter().enumerate() {
        let phi_prev = max_component_diameter(&forest_adj);
        // Quotient of (V, bucket.edges) under the contraction so far,
        // restricted to touched components, with uniform weights.
        let mut qid: BTreeMap<usize, u32> = BTreeMap::new();
        let mut q_of = |uf: &mut UnionFind, v: u32, next: &mut u32| -> u32 {
            let r = uf.find(v as usize);
            *qid.entry(r).or_insert_with(|| {
                let id = *next;
                *next += 1;
                id
            })
        };
        let mut next = 0u32;
        // (qu, qv) -> witness (weight, orig id)
        let mut qedges: BTreeMap<(u32, u32), (u64, EdgeId)> = BTreeMap::new();
        let mut w_max_num = 0u64;
        for &eid in &bucket.edges {
            let e = g.edge(eid);
            w_max_num = w_max_num.max(e.w);
            let a = q_of(&mut uf, e.u, &mut next);
            let b = q_of(&mut uf, e.v, &mut next);
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            let cand = (e.w, eid);
            qedges
                .entry(key)
                .and_modify(|cur| {
                    if cand < *cur {
                        *cur = cand;
                    }
                })
                .or_insert(cand);
        }
        let q_n = next;
        let mut level = SpannerLevel {
            group,
            level: li as u32,
            quotient_vertices: q_n,
            quotient_edges: qedges.len() as u32,
            cluster_count: 0,
            max_tree_diameter_hops: 0,
            bucket_w_low: bucket.w_low,
            bucket_w_max_num: w_max_num,
            expanded_diameter_num: phi_prev,
            cert_bound_num: 0,
        };
        if qedges.is_empty() {
            // Bucket edges (if any) were swallowed by earlier contractions;
            // their endpoints stay within one component of the forest.
            level.cert_bound_num = phi_prev;
            levels.push(level);
            continue;
        }
        let mut q_edge_list = Vec::with_capacity(qedges.len());
        let mut witness = Vec::with_capacity(qedges.len());
        for ((u, v), (_, wit)) in &qedges {
            q_edge_list.push(Edge { u: *u, v: *v, w: 1 });
            witness.push(*wit);
        }
        let quotient = Graph::assemble(q_n, 1, q_edge_list);
        let cp = ClusterParams {
            beta,
            seed: derive_seed(p.seed, li as u64),
            ..ClusterParams::new(beta, 0)
        };
        let clustering = est_cluster(&quotient, &cp)?;
        let stats = cluster_diagnostics(&quotient, &clustering);
        let d_max = stats.max_tree_diameter_num() as u64;
        level.cluster_count = clustering.cluster_count() as u32;
        level.max_tree_diameter_hops = d_max;
        level.cert_bound_num = (2 * d_max as u128 + 1) * w_max_num as u128
            + (2 * d_max as u128 + 2) * phi_prev;

        // Forest edges, mapped back through witnesses.
        let mut forest_orig = Vec::new();
        for qv in 0..q_n as usize {
            if let Some((_, qe)) = clustering.parent[qv] {
                forest_orig.push(witness[qe as usize]);
            }
        }
        for &eid in &forest_orig {
            picked.insert(
                eid,
                SpannerEdge {
                    edge: eid,
                    role: EdgeRole::Forest,
                    group,
                    level: li as u32,
                },
            );
        }
        // One edge from each boundary vertex to each adjacent cluster;
        // among candidates the smallest original edge id wins.
        let mut by_witness: Vec<(EdgeId, u32, u32)> = qedges
            .iter()
            .map(|(&(u, v), &(_, wit))| (wit, u, v))
            .collect();
        by_witness.sort_unstable();
        let mut chosen: BTreeMap<(u32, u32), EdgeId> = BTreeMap::new();
        for &(wit, qu, qv) in &by_witness {
            let cu = clustering.center[qu as usize];
            let cv = clustering.center[qv as usize];
            if cu == cv {
                continue;
            }
            chosen.entry((qu, cv)).or_insert(wit);
            chosen.entry((qv, cu)).or_insert(wit);
        }
        for (_, eid) in chosen {
            picked.entry(eid).or_insert(SpannerEdge {
                edge: eid,
                role: EdgeRole::InterCluster,
                group,
                level: li as u32,
            });
        }
        // Advance the contraction with this level's forest.
        for &eid in &forest_orig {
            let e = g.edge(eid);
            uf.union(e.u as usize, e.v as usize);
            forest_adj[e.u as usize].push((e.v, e.w));
            forest_adj[e.v as usize].push((e.u, e.w));
        }
        levels.push(level);
    }
    Ok(Spanner {
        edges: picked.into_values().collect(),
        levels,
        graph_fingerprint: g.fingerprint(),
        scale: g.scale(),
    })
}

fn validate_buckets(g: &Graph, buckets: &[WeightBucket], p: &SpannerParams) -> Result<()> {
    let scale = g.scale() as u128;
    let sep = (p.k as u128)
        .checked_pow(p.c_spacing)
        .ok_or(Error::Overflow("separation"))?;
    let mut prev_low: Option<Rat> = None;
    for (i, b) in buckets.iter().enumerate() {
        let low = b.w_low.ratio();
        for &eid in &b.edges {
            if eid as usize >= g.edge_count() {
                return Err(Error::EdgeOutOfRange(eid, g.edge_count() as u32));
            }
            let w = g.weight(eid);
            if w < low || w >= low * Rat::from_integer(2) {
                return Err(Error::BucketsNotSeparated(format!(
                    "bucket {i}: weight {}/{scale} outside [{}, 2*{})",
                    g.weight_num(eid),
                    b.w_low,
                    b.w_low
                )));
            }
        }
        if let Some(pl) = prev_low {
            if low < pl * Rat::from_integer(sep) {
                return Err(Error::BucketsNotSeparated(format!(
                    "bucket {i} lower bound not {sep}x above predecessor"
                )));
            }
        }
        prev_low = Some(low);
    }
    Ok(())
}

/// Max weighted diameter over the (tree) components of the accumulated
/// forest; numerator units.
fn max_component_diameter(forest_adj: &[Vec<(VertexId, u64)>]) -> u128 {
    let n = forest_adj.len();
    let mut seen = vec![false; n];
    let mut best = 0u128;
    for s in 0..n {
        if seen[s] || forest_adj[s].is_empty() {
            seen[s] = true;
            continue;
        }
        let (far, _) = farthest(forest_adj, s as u32, &mut seen, true);
        let mut scratch = vec![false; 0];
        let (_, d) = farthest(forest_adj, far, &mut scratch, false);
        best = best.max(d);
    }
    best
}

fn farthest(
    adj: &[Vec<(VertexId, u64)>],
    root: VertexId,
    seen: &mut Vec<bool>,
    mark: bool,
) -> (VertexId, u128) {
    let mut best = (root, 0u128);
    let mut stack = vec![(root, NO_VERTEX, 0u128)];
    while let Some((v, from, d)) = stack.pop() {
        if mark {
            seen[v as usize] = true;
        }
        if d > best.1 {
            best = (v, d);
        }
        for &(w, len) in &adj[v as usize] {
            if w != from {
                stack.push((w, v, d + len as u128));
            }
        }
    }
    best
}
