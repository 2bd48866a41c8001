//! Low-depth hopsets by gradual hop reduction.
//!
//! Instead of shortcutting arbitrarily long paths at once, each accumulation
//! round approximates paths of about `b^2` hops (`b ~ n^(alpha/2)`) with
//! paths of about `b` hops, for every distance scale `d` a power of `b`.
//! Shortcuts found in one round join the working graph before the next, so
//! hop counts shrink geometrically over `ceil(2/alpha)` rounds.
//!
//! All shortcut weights are kept as exact integers over a common working
//! scale (`graph scale * eps denominator * b^2`), so accumulation never
//! drifts.

use super::rounding::round_weights;
use super::{hopset_build, HopsetParams, ShortcutKind};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Rat, VertexId};
use crate::util::{child_seed, Frac};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowDepthShortcut {
    pub u: VertexId,
    pub v: VertexId,
    /// Weight numerator over `LowDepthHopset::unit_scale`.
    pub w: u64,
    pub kind: ShortcutKind,
    pub round: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowDepthScale {
    pub scale_pow: u32,
    pub d: Frac,
    pub hat_w: Frac,
    pub added: u64,
    pub star_edges: u64,
    pub clique_edges: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowDepthRound {
    pub round: u32,
    pub scales: Vec<LowDepthScale>,
    pub added_total: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowDepthHopset {
    pub alpha: f64,
    pub eta: f64,
    /// Integer scale base `max(2, ceil(n^eta))`.
    pub base: u64,
    /// All shortcut weights are numerators over this denominator.
    pub unit_scale: u64,
    pub shortcuts: Vec<LowDepthShortcut>,
    /// Prefix length of `shortcuts` after each round.
    pub round_offsets: Vec<usize>,
    pub rounds: Vec<LowDepthRound>,
    pub graph_fingerprint: u64,
}

impl LowDepthHopset {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    /// Shortcut tuples accumulated through the first `rounds` rounds, in
    /// `unit_scale` numerator units.
    pub fn shortcut_tuples_through(&self, rounds: usize) -> Vec<(VertexId, VertexId, u64)> {
        let end = if rounds >= self.round_offsets.len() {
            self.shortcuts.len()
        } else {
            self.round_offsets[rounds]
        };
        self.shortcuts[..end].iter().map(|s| (s.u, s.v, s.w)).collect()
    }

    /// The input graph rescaled to `unit_scale` numerators.
    pub fn rescaled_input(&self, g: &Graph) -> Result<Graph> {
        if g.fingerprint() != self.graph_fingerprint {
            return Err(Error::ArtifactMismatch);
        }
        rescale(g, self.unit_scale)
    }
}

fn rescale(g: &Graph, unit_scale: u64) -> Result<Graph> {
    assert_eq!(unit_scale % g.scale(), 0);
    let f = unit_scale / g.scale();
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| {
            e.w.checked_mul(f)
                .map(|w| Edge { u: e.u, v: e.v, w })
                .ok_or(Error::Overflow("working weight"))
        })
        .collect::<Result<_>>()?;
    Ok(Graph::assemble(g.n(), unit_scale, edges))
}

pub fn low_depth_hopset(
    g: &Graph,
    alpha: f64,
    epsilon_prime: Frac,
    seed: u64,
) -> Result<LowDepthHopset> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter("alpha must lie in (0,1)".into()));
    }
    if epsilon_prime.is_zero() || epsilon_prime.num >= epsilon_prime.den {
        return Err(Error::InvalidParameter("epsilon_prime must lie in (0,1)".into()));
    }
    let n = g.vertex_count().max(2);
    let eta = alpha / 2.0;
    let base = (n as f64).powf(eta).ceil().max(2.0) as u64;
    let round_total = (1.0 / eta).ceil() as u32;
    let unit_scale = g
        .scale()
        .checked_mul(epsilon_prime.den)
        .and_then(|x| x.checked_mul(base))
        .and_then(|x| x.checked_mul(base))
        .ok_or(Error::Overflow("working scale"))?;

    // Per-call hopset parameterization: approximate base^2-hop paths with
    // base-hop ones.
    let eps_f = epsilon_prime.to_f64();
    let delta = 2.0 / eta;
    let n_final = ((n as f64).powf(eta / 2.0).ceil() as u64).max(2);
    let beta0 = eps_f / (base as f64).powi(3);

    let mut working: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for e in rescale(g, unit_scale)?.edges() {
        working.insert((e.u, e.v), e.w);
    }
    let mut shortcuts: Vec<LowDepthShortcut> = Vec::new();
    let mut round_offsets = Vec::new();
    let mut rounds = Vec::new();

    for round in 0..round_total {
        let work_graph = Graph::assemble(
            g.n(),
            unit_scale,
            working
                .iter()
                .map(|(&(u, v), &w)| Edge { u, v, w })
                .collect(),
        );
        let scale128 = unit_scale as u128;
        let min_w = Rat::new(work_graph.min_weight_num() as u128, scale128);
        let max_dist = Rat::new(
            (work_graph.vertex_count().saturating_sub(1) as u128).max(1)
                * work_graph.max_weight_num() as u128,
            scale128,
        );
        let lo = floor_log(base, min_w);
        let hi = floor_log(base, max_dist).max(lo);
        let mut round_report = LowDepthRound {
            round,
            scales: Vec::new(),
            added_total: 0,
        };
        for pow in lo..=hi {
            let d_num = base
                .checked_pow(pow)
                .ok_or(Error::Overflow("distance scale"))?;
            let d = Frac::integer(d_num);
            // hat_w = eps * d / base^2.
            let k_hops = base
                .checked_mul(base)
                .ok_or(Error::Overflow("hop target"))?;
            let rounded = round_weights(&work_graph, d, k_hops, epsilon_prime)?;
            let mut hp = HopsetParams::new(eps_f, delta, 0.3, 0.6, 0);
            hp.n_final = Some(n_final);
            hp.beta0 = Some(beta0);
            hp.seed = child_seed(child_seed(seed, round as u64), pow as u64);
            let hs = hopset_build(&rounded.graph, &hp)?;
            let mut added = 0u64;
            let (hn, hd) = (rounded.hat_w.num as u128, rounded.hat_w.den as u128);
            debug_assert_eq!(scale128 % hd, 0);
            let per_unit = scale128 / hd * hn;
            for s in &hs.shortcuts {
                let w128 = (s.w as u128)
                    .checked_mul(per_unit)
                    .ok_or(Error::Overflow("accumulated weight"))?;
                let w = u64::try_from(w128).map_err(|_| Error::Overflow("accumulated weight"))?;
                let key = (s.u.min(s.v), s.u.max(s.v));
                let cur = working.get(&key).copied().unwrap_or(u64::MAX);
                if w < cur {
                    working.insert(key, w);
                }
                shortcuts.push(LowDepthShortcut {
                    u: key.0,
                    v: key.1,
                    w,
                    kind: s.kind,
                    round,
                });
                added += 1;
            }
            round_report.scales.push(LowDepthScale {
                scale_pow: pow,
                d,
                hat_w: rounded.hat_w,
                added,
                star_edges: hs.star_count(),
                clique_edges: hs.clique_count(),
            });
            round_report.added_total += added;
        }
        rounds.push(round_report);
        round_offsets.push(shortcuts.len());
    }

    Ok(LowDepthHopset {
        alpha,
        eta,
        base,
        unit_scale,
        shortcuts,
        round_offsets,
        rounds,
        graph_fingerprint: g.fingerprint(),
    })
}

fn floor_log(base: u64, x: Rat) -> u32 {
    let mut i = 0u32;
    let mut pw = Rat::from_integer(base as u128);
    while pw <= x {
        match pw.numer().checked_mul(base as u128) {
            Some(n) => pw = Ratio::new(n, *pw.denom()),
            None => break,
        }
        i += 1;
    }
    i
}
