//! The full approximate distance oracle: hierarchical weight decomposition,
//! per-query-graph and per-distance-scale hopsets, and hop-limited queries.
//!
//! Preprocessing splits the `(1+eps')` budget three ways: the decomposition
//! may shorten distances by an `eps'/4` fraction, rounding overshoots by at
//! most `zeta = eps'/2`, and the hopsets get the remaining `eps'/4`. For
//! each query graph, distance scales run over powers of an integer base
//! `b ~ n^eta`; each scale is rounded at granularity `zeta * d / n` and gets
//! `repetitions` independently seeded hopsets. A query maps to its level
//! graph, runs a hop-limited search per bundle with the recorded hop budget,
//! and returns the minimum over scales and repetitions, rescaled back.

use super::decomposition::{map_query, weight_decomposition, QueryLoc, WeightDecomposition};
use super::rounding::{round_weights, RoundedGraph};
use super::{hopset_build, Hopset, HopsetParams};
use crate::error::{Error, Result};
use crate::graph::{Graph, Rat, VertexId};
use crate::sssp::{dijkstra, RelaxEngine};
use crate::util::{child_seed, Frac};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

pub const ORACLE_FORMAT: &str = "hopspan-oracle/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleParams {
    /// User-facing distortion; answers aim for `(1+eps') * dist`.
    pub epsilon_prime: Frac,
    /// Scale exponent; the scale base is `max(2, ceil(n^eta))`.
    pub eta: f64,
    /// Rounding share of the budget (`eps'/2`).
    pub zeta: Frac,
    /// Decomposition share of the budget (`eps'/4`).
    pub eps_dec: Frac,
    /// Hopset parameters with the hopset share in `epsilon_prime`.
    pub hopset: HopsetParams,
    /// Integer scale base.
    pub base: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Bundle {
    pub qg: u32,
    /// Scale is `d = base^scale_pow`.
    pub scale_pow: u32,
    pub d: Frac,
    pub hat_w: Frac,
    pub rep: u32,
    pub hopset: Hopset,
    pub predicted_h: u64,
    #[serde(skip)]
    engine: OnceLock<RelaxEngine>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OracleIndex {
    pub format: String,
    pub params: OracleParams,
    pub decomposition: WeightDecomposition,
    pub bundles: Vec<Bundle>,
    /// Scale count per query graph (bundle bookkeeping).
    pub scales_per_qg: Vec<u32>,
    pub n: u32,
    pub graph_fingerprint: u64,
}

#[derive(Debug, Clone)]
pub struct QueryAnswer {
    /// Approximate distance in the graph's weight units; `None` when the
    /// endpoints are disconnected.
    pub distance: Option<Rat>,
    pub level: u32,
    pub scale_pow: Option<u32>,
    pub rep: Option<u32>,
    pub hops_used: u64,
    /// True when no hop-limited bundle reached the target and the oracle
    /// fell back to a plain search on the level graph.
    pub fallback: bool,
}

impl QueryAnswer {
    pub fn distance_f64(&self) -> Option<f64> {
        self.distance
            .map(|d| *d.numer() as f64 / *d.denom() as f64)
    }
}

pub fn build_oracle(
    g: &Graph,
    epsilon_prime: Frac,
    eta: f64,
    hopset: &HopsetParams,
) -> Result<OracleIndex> {
    if epsilon_prime.is_zero() || epsilon_prime.num >= epsilon_prime.den {
        return Err(Error::InvalidParameter("epsilon_prime must lie in (0,1)".into()));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter("eta must lie in (0,1)".into()));
    }
    let zeta = Frac::new(epsilon_prime.num, epsilon_prime.den.saturating_mul(2));
    let eps_dec = Frac::new(epsilon_prime.num, epsilon_prime.den.saturating_mul(4));
    let mut hp = hopset.clone();
    hp.epsilon_prime = eps_dec.to_f64();
    hp.validate()?;

    let decomposition = weight_decomposition(g, eps_dec)?;
    let n = g.vertex_count().max(2);
    let base = (n as f64).powf(eta).ceil().max(2.0) as u64;

    let mut bundles = Vec::new();
    let mut scales_per_qg = Vec::new();
    for (qi, qg) in decomposition.query_graphs.iter().enumerate() {
        let graph = &qg.graph;
        let n_q = graph.vertex_count().max(2);
        let scale = graph.scale() as u128;
        let min_w = Rat::new(graph.min_weight_num() as u128, scale);
        let max_dist = Rat::new(
            (graph.vertex_count().saturating_sub(1) as u128).max(1)
                * graph.max_weight_num() as u128,
            scale,
        );
        let lo = floor_log(base, min_w);
        let hi = floor_log(base, max_dist).max(lo);
        scales_per_qg.push((hi - lo + 1) as u32);
        // Hopset parameterization for this graph: top rate (n/eps)^-gamma2.
        let ln_nq = (n_q as f64).ln();
        let eps_internal = hp.epsilon_prime / ln_nq;
        let derived_probe = {
            let mut p = hp.clone();
            p.beta0 = Some((n_q as f64 / eps_internal).powf(-hp.gamma2));
            p
        };
        for pow in lo..=hi {
            let d_num = checked_pow(base, pow)?;
            let d = Frac::integer(d_num);
            let k_hops = n_q as u64;
            let rounded = round_weights(graph, d, k_hops, zeta)?;
            for rep in 0..hp.repetitions {
                let mut p = derived_probe.clone();
                p.seed = child_seed(child_seed(child_seed(hp.seed, qi as u64), pow as u64), rep as u64);
                let hs = hopset_build(&rounded.graph, &p)?;
                // Max relevant rounded distance for this scale is
                // d * base / hat_w = k_hops * base / zeta.
                let reach = k_hops as f64 * base as f64 / zeta.to_f64();
                let mut predicted_h = ceil_to_u64(hs.derived.hop_factor * reach);
                if hs.is_empty() {
                    predicted_h = predicted_h.max(n_q as u64 - 1);
                }
                bundles.push(Bundle {
                    qg: qi as u32,
                    scale_pow: pow,
                    d,
                    hat_w: rounded.hat_w,
                    rep,
                    hopset: hs,
                    predicted_h,
                    engine: OnceLock::new(),
                });
            }
        }
    }
    Ok(OracleIndex {
        format: ORACLE_FORMAT.to_string(),
        params: OracleParams {
            epsilon_prime,
            eta,
            zeta,
            eps_dec,
            hopset: hp,
            base,
        },
        decomposition,
        bundles,
        scales_per_qg,
        n: g.n(),
        graph_fingerprint: g.fingerprint(),
    })
}

impl OracleIndex {
    pub fn rounded_graph_for(&self, b: &Bundle) -> Result<RoundedGraph> {
        let qg = &self.decomposition.query_graphs[b.qg as usize];
        round_weights(&qg.graph, b.d, qg.graph.vertex_count().max(2) as u64, self.params.zeta)
    }

    fn engine_for<'a>(&self, b: &'a Bundle) -> &'a RelaxEngine {
        b.engine.get_or_init(|| {
            let rounded = self
                .rounded_graph_for(b)
                .expect("bundle re-rounding is deterministic");
            RelaxEngine::new(&rounded.graph, &b.hopset.edge_tuples())
        })
    }

    pub fn bundle_count(&self) -> usize {
        self.bundles.len()
    }

    pub fn save<W: std::io::Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer(out, self)?;
        Ok(())
    }

    pub fn load<R: std::io::Read>(input: R) -> Result<OracleIndex> {
        let idx: OracleIndex = serde_json::from_reader(input)?;
        if idx.format != ORACLE_FORMAT {
            return Err(Error::Parse(format!(
                "unsupported oracle format {:?}",
                idx.format
            )));
        }
        Ok(idx)
    }
}

/// `(1+eps')`-approximate distance between `s` and `t`.
///
/// Upper side holds with probability `1 - 2^-repetitions` per query; the
/// lower side (`answer >= (1 - eps') * dist`) always holds because the level
/// graph only contracts short edges and rounding only rounds up.
pub fn query_oracle(o: &OracleIndex, s: VertexId, t: VertexId) -> Result<QueryAnswer> {
    if s >= o.n {
        return Err(Error::VertexOutOfRange(s as u64, o.n));
    }
    if t >= o.n {
        return Err(Error::VertexOutOfRange(t as u64, o.n));
    }
    match map_query(&o.decomposition, s, t) {
        QueryLoc::Zero => Ok(QueryAnswer {
            distance: Some(Ratio::from_integer(0)),
            level: 0,
            scale_pow: None,
            rep: None,
            hops_used: 0,
            fallback: false,
        }),
        QueryLoc::Unreachable => Ok(QueryAnswer {
            distance: None,
            level: 0,
            scale_pow: None,
            rep: None,
            hops_used: 0,
            fallback: false,
        }),
        QueryLoc::Mapped { qg, level, s, t } => {
            let mut best: Option<(Rat, u32, u32, u64)> = None;
            for b in o.bundles.iter().filter(|b| b.qg == qg) {
                let engine = o.engine_for(b);
                let run = engine.run(s, b.predicted_h);
                if let Some(rd) = run.distance(t) {
                    let cand = b.hat_w.ratio() * Ratio::from_integer(rd);
                    let better = match &best {
                        None => true,
                        Some((cur, ..)) => cand < *cur,
                    };
                    if better {
                        best = Some((cand, b.scale_pow, b.rep, run.rounds));
                    }
                }
            }
            if let Some((d, pow, rep, hops)) = best {
                return Ok(QueryAnswer {
                    distance: Some(d),
                    level,
                    scale_pow: Some(pow),
                    rep: Some(rep),
                    hops_used: hops,
                    fallback: false,
                });
            }
            // No scale reached the target within its hop budget; fall back to
            // an exact search on the level graph.
            let graph = &o.decomposition.query_graphs[qg as usize].graph;
            let run = dijkstra(graph, s);
            let d = run
                .distance(t)
                .expect("mapped endpoints are connected in their level graph");
            Ok(QueryAnswer {
                distance: Some(Ratio::new(d, graph.scale() as u128)),
                level,
                scale_pow: None,
                rep: None,
                hops_used: 0,
                fallback: true,
            })
        }
    }
}

/// Largest `i >= 0` with `base^i <= x`.
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

fn checked_pow(base: u64, pow: u32) -> Result<u64> {
    base.checked_pow(pow).ok_or(Error::Overflow("distance scale"))
}

fn ceil_to_u64(x: f64) -> u64 {
    if !x.is_finite() || x >= u64::MAX as f64 {
        u64::MAX
    } else {
        (x.ceil() as u64).max(1)
    }
}
