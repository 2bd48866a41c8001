//! Weight rounding: integer search graphs at a chosen granularity.
//!
//! For a target distance `d` and hop budget `k`, the granularity is
//! `hat_w = zeta * d / k` and each weight becomes `ceil(w / hat_w)`. A path
//! with at most `k` hops and weight in `[d, c*d]` then has rounded weight at
//! most `ceil(c*k/zeta)`, and scaling back overshoots by at most `1 + zeta`.

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Rat};
use crate::util::Frac;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundedGraph {
    /// Same topology and edge ids as the original, integer weights.
    pub graph: Graph,
    /// Granularity in the original graph's weight units.
    pub hat_w: Frac,
    pub d: Frac,
    pub k_hops: u64,
    pub zeta: Frac,
    pub orig_fingerprint: u64,
}

impl RoundedGraph {
    /// Convert a rounded distance back to original weight units.
    pub fn unround(&self, rounded: u128) -> Rat {
        self.hat_w.ratio() * Ratio::from_integer(rounded)
    }
}

pub fn round_weights(g: &Graph, d: Frac, k_hops: u64, zeta: Frac) -> Result<RoundedGraph> {
    if d.is_zero() {
        return Err(Error::InvalidParameter("d must be positive".into()));
    }
    if k_hops < 1 {
        return Err(Error::InvalidParameter("k_hops must be >= 1".into()));
    }
    if zeta.is_zero() || zeta.ratio() >= Rat::from_integer(1) {
        return Err(Error::InvalidParameter("zeta must lie in (0,1)".into()));
    }
    let hat = zeta.ratio() * d.ratio() / Rat::from_integer(k_hops as u128);
    let hat_w = Frac::from_ratio(hat)?;
    // w~(e) = ceil( (num/scale) / (hn/hd) ) = ceil( num*hd / (scale*hn) )
    let hn = *hat.numer();
    let hd = *hat.denom();
    let scale = g.scale() as u128;
    let den = scale
        .checked_mul(hn)
        .ok_or(Error::Overflow("rounding denominator"))?;
    let mut edges = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let num = (e.w as u128)
            .checked_mul(hd)
            .ok_or(Error::Overflow("rounding numerator"))?;
        let rounded = num.div_ceil(den);
        let w = u64::try_from(rounded).map_err(|_| Error::Overflow("rounded weight"))?;
        edges.push(Edge { u: e.u, v: e.v, w });
    }
    Ok(RoundedGraph {
        graph: Graph::assemble(g.n(), 1, edges),
        hat_w,
        d,
        k_hops,
        zeta,
        orig_fingerprint: g.fingerprint(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn weight_equal_to_granularity_rounds_to_one() {
        // hat_w = 0.5*10/5 = 1; an edge of weight exactly 1 stays 1.
        let g = build_graph(&[(0, 1, 1), (1, 2, 1)], 3).unwrap();
        let r = round_weights(&g, Frac::integer(10), 5, Frac::new(1, 2)).unwrap();
        assert_eq!(r.hat_w, Frac::integer(1));
        assert!(r.graph.edges().iter().all(|e| e.w == 1));
    }

    #[test]
    fn granularity_arithmetic() {
        // d=100, k=10, zeta=1/2 -> hat_w = 5; weight 12 -> ceil(12/5) = 3.
        let g = build_graph(&[(0, 1, 12), (1, 2, 1)], 3).unwrap();
        let r = round_weights(&g, Frac::integer(100), 10, Frac::new(1, 2)).unwrap();
        assert_eq!(r.hat_w, Frac::integer(5));
        let heavy = g.edges().iter().position(|e| e.w == 12).unwrap();
        assert_eq!(r.graph.edges()[heavy].w, 3);
    }

    #[test]
    fn rounding_inequalities_on_random_paths() {
        // For random walks p with <= k hops and d <= w(p) <= c*d:
        //   w~(p) <= ceil(c*k/zeta)  and  hat_w * w~(p) <= (1+zeta) * w(p).
        // Exact rational checks, zero tolerance.
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let n = 40u32;
        let mut edges = vec![(0, 1, 1u64)];
        for v in 1..n {
            edges.push((rng.random_range(0..v), v, rng.random_range(1..50)));
        }
        for _ in 0..80 {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v {
                edges.push((u, v, rng.random_range(1..50)));
            }
        }
        let g = build_graph(&edges, n).unwrap();
        let c: u64 = 4;
        for trial in 0..200 {
            // Random walk of up to 12 edges.
            let mut path = Vec::new();
            let mut cur = rng.random_range(0..n);
            let hops = 1 + rng.random_range(0..12u32);
            for _ in 0..hops {
                let nbrs = g.adj(cur);
                if nbrs.is_empty() {
                    break;
                }
                let (next, eid) = nbrs[rng.random_range(0..nbrs.len())];
                path.push(eid);
                cur = next;
            }
            if path.is_empty() {
                continue;
            }
            let k = path.len() as u64;
            let w_num: u128 = path.iter().map(|&e| g.weight_num(e) as u128).sum();
            // Pick d with d <= w(p) <= c*d. The tight estimate d = w(p) and
            // the interior one d = w(p)/2 both satisfy the precondition for
            // c = 4 and keep the ceiling slack within the stated bound.
            let d = if trial % 2 == 0 {
                Frac::new(u64::try_from(w_num).unwrap(), g.scale() * 2)
            } else {
                Frac::new(u64::try_from(w_num).unwrap(), g.scale())
            };
            for zeta in [Frac::new(1, 4), Frac::new(1, 2)] {
                let r = round_weights(&g, d, k, zeta).unwrap();
                let tilde: u128 = path.iter().map(|&e| r.graph.weight_num(e) as u128).sum();
                // w~(p) <= ceil(c*k/zeta)
                let bound = (Rat::new((c * k) as u128, 1) / zeta.ratio()).ceil();
                assert!(
                    Rat::from_integer(tilde) <= bound,
                    "hop-weight bound violated"
                );
                // hat_w * w~(p) <= (1+zeta) w(p)
                let lhs = r.hat_w.ratio() * Rat::from_integer(tilde);
                let wp = Rat::new(w_num, g.scale() as u128);
                let rhs = (Rat::from_integer(1) + zeta.ratio()) * wp;
                assert!(lhs <= rhs, "scale-back bound violated: {lhs} > {rhs}");
                // And rounding never undershoots.
                assert!(lhs >= wp);
            }
        }
    }
}
