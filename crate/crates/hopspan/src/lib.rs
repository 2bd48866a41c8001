//! Graph decomposition with exponential start times, and what it buys you:
//! sparse spanners, hopsets, and `(1+eps)`-approximate shortest-path oracles.
//!
//! The crate is organized around a handful of layers:
//!
//! * [`graph`] — the shared substrate: normalized undirected weighted graphs
//!   with exact (integer-over-common-denominator) weights, induced subgraphs,
//!   quotient (contraction) graphs, connected components, and weight
//!   bucketing.
//! * [`cluster`] — exponential start time clustering, in a definitional
//!   "exact" mode and a round-based integer-shift mode, plus diagnostics for
//!   its probabilistic guarantees.
//! * [`spanner`] — `O(k)`-stretch spanners: the unweighted construction, the
//!   well-separated weighted construction over contraction levels, and the
//!   power-of-two bucket split that glues them together.
//! * [`hopset`] — recursive star/clique hopsets, weight rounding, the
//!   hierarchical weight decomposition, the full distance-oracle pipeline,
//!   and the low-depth iterated variant.
//! * [`sssp`] — distance engines: BFS, Dijkstra, round-based weighted BFS on
//!   integer weights, and hop-limited relaxation over graph + hopset.
//! * [`generate`] / [`report`] — graph generators, seeded experiment runner,
//!   statistical verifiers, and machine-readable reports.
//!
//! Everything is deterministic given `(input, seed)`: weights and distances
//! are exact integers, random shifts are drawn from seeded ChaCha streams and
//! quantized to fixed point, and no output depends on scheduling.
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `hopspan` binary for the command-line harness.

pub mod cluster;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hopset;
pub mod io;
pub mod report;
pub mod spanner;
pub mod sssp;
pub mod util;

pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, Rat, VertexId};
pub use util::Frac;
