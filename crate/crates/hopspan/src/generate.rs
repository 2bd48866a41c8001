//! Seeded graph generators for experiments and benchmarks.

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum GraphModel {
    Path { n: u32 },
    Cycle { n: u32 },
    Grid { rows: u32, cols: u32 },
    Gnm { n: u32, m: u64 },
    /// Random points on the unit torus, edges between pairs within `radius`.
    Geometric { n: u32, radius: f64 },
}

/// Log-uniform integer weights in `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub min: u64,
    pub max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(flatten)]
    pub model: GraphModel,
    pub weights: Option<WeightSpec>,
}

impl GraphSpec {
    pub fn unweighted(model: GraphModel) -> GraphSpec {
        GraphSpec {
            model,
            weights: None,
        }
    }
}

pub fn generate_graph(spec: &GraphSpec, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (n, topo) = topology(&spec.model, &mut rng)?;
    let edges: Vec<(VertexId, VertexId, u64)> = match spec.weights {
        None => topo.into_iter().map(|(u, v)| (u, v, 1)).collect(),
        Some(ws) => {
            if ws.min < 1 || ws.min > ws.max {
                return Err(Error::InvalidParameter(
                    "weight range needs 1 <= min <= max".into(),
                ));
            }
            let (lo, hi) = ((ws.min as f64).ln(), (ws.max as f64).ln());
            topo.into_iter()
                .map(|(u, v)| {
                    let w = (rng.random_range(lo..=hi)).exp().round() as u64;
                    (u, v, w.clamp(ws.min, ws.max))
                })
                .collect()
        }
    };
    if n > 0 && edges.is_empty() {
        return crate::graph::build_graph_rational(&[], n);
    }
    build_graph(&edges, n)
}

fn topology(model: &GraphModel, rng: &mut ChaCha12Rng) -> Result<(u32, Vec<(u32, u32)>)> {
    match *model {
        GraphModel::Path { n } => {
            require(n >= 1, "path needs n >= 1")?;
            Ok((n, (1..n).map(|v| (v - 1, v)).collect()))
        }
        GraphModel::Cycle { n } => {
            require(n >= 3, "cycle needs n >= 3")?;
            Ok((n, (0..n).map(|v| (v, (v + 1) % n)).collect()))
        }
        GraphModel::Grid { rows, cols } => {
            require(rows >= 1 && cols >= 1, "grid needs rows, cols >= 1")?;
            let idx = |r: u32, c: u32| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((idx(r, c), idx(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((idx(r, c), idx(r + 1, c)));
                    }
                }
            }
            Ok((rows * cols, edges))
        }
        GraphModel::Gnm { n, m } => {
            require(n >= 1, "gnm needs n >= 1")?;
            let max_m = n as u64 * (n as u64 - 1) / 2;
            require(m <= max_m, "gnm: m exceeds n*(n-1)/2")?;
            let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
            while (seen.len() as u64) < m {
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u != v {
                    seen.insert((u.min(v), u.max(v)));
                }
            }
            Ok((n, seen.into_iter().collect()))
        }
        GraphModel::Geometric { n, radius } => {
            require(n >= 1, "geometric needs n >= 1")?;
            require(
                radius > 0.0 && radius <= 0.5,
                "geometric needs radius in (0, 0.5]",
            )?;
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
                .collect();
            let mut edges = Vec::new();
            let r2 = radius * radius;
            for i in 0..n as usize {
                for j in (i + 1)..n as usize {
                    // Torus metric keeps the expected degree exactly
                    // (n-1) * pi * r^2, free of boundary effects.
                    let dx = torus_delta(pts[i].0, pts[j].0);
                    let dy = torus_delta(pts[i].1, pts[j].1);
                    if dx * dx + dy * dy <= r2 {
                        edges.push((i as u32, j as u32));
                    }
                }
            }
            Ok((n, edges))
        }
    }
}

/// Radius giving expected degree `deg` on the unit torus.
pub fn geometric_radius_for_degree(n: u32, deg: f64) -> f64 {
    (deg / ((n.max(2) - 1) as f64 * std::f64::consts::PI)).sqrt()
}

fn torus_delta(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg.into()))
    }
}
