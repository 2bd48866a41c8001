//! Hierarchical weight decomposition: reduce arbitrary weight ratios to a
//! family of query graphs with polynomially bounded weights.
//!
//! Edges fall into categories `i` with `base^i <= w < base^(i+1)` where
//! `base = n / eps`. Level `j` of the laminar tree holds the connected
//! components of the union of the first `j` nonempty categories; the leaves
//! are the vertices. A query `(s, t)` maps to the level where the two first
//! meet. Its query graph keeps the three weight bands around that level and
//! contracts everything at least two categories below, which shortens paths
//! by at most an `eps` fraction; heavier bands can never appear on a
//! relevant shortest path. Each edge therefore shows up in at most three
//! query graphs, and levels where no components merge are skipped entirely
//! (the long-chain trimming), keeping the total size linear.

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, Graph, UnionFind, VertexId, NO_VERTEX};
use crate::util::Frac;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoryInfo {
    /// Category exponent `i`: weights in `[base^i, base^(i+1))`.
    pub index: u32,
    pub edges: Vec<EdgeId>,
}

/// Component labels after merging one more nonempty category.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompLevel {
    pub comp: Vec<u32>,
    pub comp_count: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QueryGraph {
    /// 1-based level this graph serves.
    pub level: u32,
    pub graph: Graph,
    /// Original vertex -> query-graph vertex (`NO_VERTEX` when absent).
    pub vmap: Vec<u32>,
    /// Query-graph edge -> original edge id (minimum-weight witness).
    pub edge_orig: Vec<EdgeId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightDecomposition {
    /// Category base `n / eps`.
    pub base: Frac,
    pub epsilon: Frac,
    /// Nonempty categories in increasing weight order; position `j-1` holds
    /// the `j`-th nonempty category.
    pub categories: Vec<CategoryInfo>,
    /// `levels[j]` = components of the first `j` nonempty categories
    /// (so `levels[0]` is the all-singletons labeling).
    pub levels: Vec<DecompLevel>,
    /// Query graphs for the levels where at least one merge happens.
    pub query_graphs: Vec<QueryGraph>,
    /// Level `j` (1-based) -> index into `query_graphs`.
    pub level_to_qg: Vec<Option<u32>>,
    pub n: u32,
    pub graph_fingerprint: u64,
}

impl WeightDecomposition {
    pub fn level_count(&self) -> usize {
        self.categories.len()
    }

    /// Total edges across all query graphs; at most `3 m`.
    pub fn total_query_edges(&self) -> usize {
        self.query_graphs.iter().map(|q| q.graph.edge_count()).sum()
    }

    pub fn total_query_vertices(&self) -> usize {
        self.query_graphs
            .iter()
            .map(|q| q.graph.vertex_count())
            .sum()
    }
}

/// Where a query landed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryLoc {
    /// `s == t`.
    Zero,
    /// Different components of the input graph.
    Unreachable,
    Mapped {
        qg: u32,
        level: u32,
        s: VertexId,
        t: VertexId,
    },
}

pub fn weight_decomposition(g: &Graph, epsilon: Frac) -> Result<WeightDecomposition> {
    if epsilon.is_zero() || epsilon.num >= epsilon.den {
        return Err(Error::InvalidParameter("epsilon must lie in (0,1)".into()));
    }
    let n = g.vertex_count();
    // base = n / eps  (numerator n*den, denominator num)
    let base_num = (n.max(2) as u64)
        .checked_mul(epsilon.den)
        .ok_or(Error::Overflow("category base"))?;
    let base = Frac::new(base_num, epsilon.num);

    // Assign categories.
    let mut by_cat: BTreeMap<u32, Vec<EdgeId>> = BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        let c = category_of(e.w, g.scale(), base);
        by_cat.entry(c).or_default().push(id as EdgeId);
    }
    let categories: Vec<CategoryInfo> = by_cat
        .into_iter()
        .map(|(index, edges)| CategoryInfo { index, edges })
        .collect();

    // Progressive union-find; capture labels after each nonempty category.
    let mut uf = UnionFind::new(n);
    let mut levels = Vec::with_capacity(categories.len() + 1);
    levels.push(capture_labels(&mut uf, n));
    for cat in &categories {
        for &eid in &cat.edges {
            let e = g.edge(eid);
            uf.union(e.u as usize, e.v as usize);
        }
        levels.push(capture_labels(&mut uf, n));
    }

    // Materialize query graphs for merging levels only.
    let mut query_graphs = Vec::new();
    let mut level_to_qg = vec![None; categories.len() + 1];
    for j in 1..=categories.len() {
        if levels[j].comp_count == levels[j - 1].comp_count {
            continue; // no merge: never an LCA level
        }
        let qg = build_query_graph(g, &categories, &levels, j)?;
        level_to_qg[j] = Some(query_graphs.len() as u32);
        query_graphs.push(qg);
    }

    Ok(WeightDecomposition {
        base,
        epsilon,
        categories,
        levels,
        query_graphs,
        level_to_qg,
        n: n as u32,
        graph_fingerprint: g.fingerprint(),
    })
}

/// Map a distance query to its level graph. The distance between the mapped
/// endpoints underestimates the true one by at most an `eps` fraction and
/// never overestimates it.
pub fn map_query(wd: &WeightDecomposition, s: VertexId, t: VertexId) -> QueryLoc {
    if s == t {
        return QueryLoc::Zero;
    }
    let (s, t) = (s as usize, t as usize);
    let mut level = None;
    for (j, lvl) in wd.levels.iter().enumerate() {
        if lvl.comp[s] == lvl.comp[t] {
            level = Some(j);
            break;
        }
    }
    let Some(j) = level else {
        return QueryLoc::Unreachable;
    };
    debug_assert!(j >= 1, "distinct vertices cannot meet at level 0");
    let qg_idx = wd.level_to_qg[j].expect("an LCA level always merges something");
    let qg = &wd.query_graphs[qg_idx as usize];
    let (ms, mt) = (qg.vmap[s], qg.vmap[t]);
    debug_assert!(ms != NO_VERTEX && mt != NO_VERTEX && ms != mt);
    QueryLoc::Mapped {
        qg: qg_idx,
        level: j as u32,
        s: ms,
        t: mt,
    }
}

/// Largest `i` with `base^i <= w` (weights are >= 1, so `i >= 0`).
fn category_of(num: u64, scale: u64, base: Frac) -> u32 {
    let w_num = BigUint::from(num);
    let w_den = BigUint::from(scale);
    let p = BigUint::from(base.num);
    let q = BigUint::from(base.den);
    let mut i = 0u32;
    let mut pw = p.clone();
    let mut qw = q.clone();
    // while w >= base^(i+1)
    while &w_num * &qw >= &w_den * &pw {
        pw *= &p;
        qw *= &q;
        i += 1;
    }
    i
}

fn capture_labels(uf: &mut UnionFind, n: usize) -> DecompLevel {
    let mut label = vec![NO_VERTEX; n];
    let mut comp = vec![0u32; n];
    let mut count = 0u32;
    for v in 0..n {
        let r = uf.find(v);
        if label[r] == NO_VERTEX {
            label[r] = count;
            count += 1;
        }
        comp[v] = label[r];
    }
    DecompLevel {
        comp,
        comp_count: count,
    }
}

/// Query graph for level `j`: contract components two categories below,
/// keep the bands `j-1`, `j`, `j+1` (1-based positions in the nonempty
/// category list).
fn build_query_graph(
    g: &Graph,
    categories: &[CategoryInfo],
    levels: &[DecompLevel],
    j: usize,
) -> Result<QueryGraph> {
    let contract_level = j.saturating_sub(2);
    let contract = &levels[contract_level].comp;
    let mut kept: Vec<EdgeId> = Vec::new();
    for band in [j.checked_sub(1), Some(j), j.checked_add(1)] {
        if let Some(b) = band {
            if b >= 1 && b <= categories.len() {
                kept.extend_from_slice(&categories[b - 1].edges);
            }
        }
    }
    kept.sort_unstable();
    // Dense vertex ids over touched components, in first-appearance order.
    let mut vid: BTreeMap<u32, u32> = BTreeMap::new();
    let mut next = 0u32;
    let mut merged: BTreeMap<(u32, u32), (u64, EdgeId)> = BTreeMap::new();
    for &eid in &kept {
        let e = g.edge(eid);
        let (a, b) = (contract[e.u as usize], contract[e.v as usize]);
        if a == b {
            continue; // swallowed by the contraction
        }
        let qa = *vid.entry(a).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
        let qb = *vid.entry(b).or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
        let key = (qa.min(qb), qa.max(qb));
        let cand = (e.w, eid);
        merged
            .entry(key)
            .and_modify(|cur| {
                if cand < *cur {
                    *cur = cand;
                }
            })
            .or_insert(cand);
    }
    let mut edges = Vec::with_capacity(merged.len());
    let mut edge_orig = Vec::with_capacity(merged.len());
    for ((u, v), (w, eid)) in merged {
        edges.push(Edge { u, v, w });
        edge_orig.push(eid);
    }
    let graph = Graph::assemble(next, g.scale(), edges);
    let mut vmap = vec![NO_VERTEX; g.vertex_count()];
    for (v, m) in vmap.iter_mut().enumerate() {
        if let Some(&q) = vid.get(&contract[v]) {
            *m = q;
        }
    }
    Ok(QueryGraph {
        level: j as u32,
        graph,
        vmap,
        edge_orig,
    })
}
