//! Command-line harness over the library: graph generation, seeded
//! experiments with statistical checks, oracle build/query, and artifact
//! verification. Exit status reflects the pass/fail outcome of whatever
//! checks ran.

use clap::{Args, Parser, Subcommand, ValueEnum};
use hopspan::cluster::ClusterMode;
use hopspan::generate::{generate_graph, GraphModel, GraphSpec, WeightSpec};
use hopspan::graph::Graph;
use hopspan::hopset::{build_oracle, query_oracle, HopsetParams, OracleIndex};
use hopspan::io::{read_graph_file, write_graph_file};
use hopspan::report::{
    run_experiment, verify, Artifact, BallCheckCfg, ExperimentConfig, ExperimentKind, GraphSource,
};
use hopspan::spanner::{unweighted_spanner, weighted_spanner, SpannerParams};
use hopspan::util::Frac;
use hopspan::{Error, Result};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hopspan", about = "Clustering, spanners, hopsets, and distance oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct GraphArgs {
    /// Read the graph from an edge-list file.
    #[arg(long, conflicts_with_all = ["model", "n"])]
    graph: Option<PathBuf>,
    /// Generate the graph instead: path, cycle, grid, gnm, geometric.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    rows: Option<u32>,
    #[arg(long)]
    cols: Option<u32>,
    #[arg(long)]
    radius: Option<f64>,
    /// Log-uniform weight range lower end.
    #[arg(long)]
    wmin: Option<u64>,
    /// Log-uniform weight range upper end.
    #[arg(long)]
    wmax: Option<u64>,
}

impl GraphArgs {
    fn source(&self) -> Result<GraphSource> {
        if let Some(path) = &self.graph {
            return Ok(GraphSource::File {
                path: path.display().to_string(),
            });
        }
        Ok(GraphSource::Model(self.spec()?))
    }

    fn spec(&self) -> Result<GraphSpec> {
        let model = self
            .model
            .as_deref()
            .ok_or_else(|| Error::InvalidParameter("need --graph FILE or --model".into()))?;
        let need_n = || {
            self.n
                .ok_or_else(|| Error::InvalidParameter(format!("model {model} needs --n")))
        };
        let model = match model {
            "path" => GraphModel::Path { n: need_n()? },
            "cycle" => GraphModel::Cycle { n: need_n()? },
            "grid" => GraphModel::Grid {
                rows: self
                    .rows
                    .ok_or_else(|| Error::InvalidParameter("grid needs --rows".into()))?,
                cols: self
                    .cols
                    .ok_or_else(|| Error::InvalidParameter("grid needs --cols".into()))?,
            },
            "gnm" => GraphModel::Gnm {
                n: need_n()?,
                m: self
                    .m
                    .ok_or_else(|| Error::InvalidParameter("gnm needs --m".into()))?,
            },
            "geometric" => GraphModel::Geometric {
                n: need_n()?,
                radius: self
                    .radius
                    .ok_or_else(|| Error::InvalidParameter("geometric needs --radius".into()))?,
            },
            other => {
                return Err(Error::InvalidParameter(format!("unknown model {other:?}")));
            }
        };
        let weights = match (self.wmin, self.wmax) {
            (None, None) => None,
            (lo, hi) => Some(WeightSpec {
                min: lo.unwrap_or(1),
                max: hi.unwrap_or(lo.unwrap_or(1)),
            }),
        };
        Ok(GraphSpec { model, weights })
    }

    fn load(&self) -> Result<Graph> {
        match (&self.graph, &self.model) {
            (Some(path), _) => read_graph_file(path),
            _ => generate_graph(&self.spec()?, 0),
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of independently seeded runs.
    #[arg(long, default_value_t = 1)]
    seeds: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Gen {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exponential start time clustering experiment.
    Cluster {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "exact")]
        mode: String,
        #[arg(long, default_value_t = 2.0)]
        k_prime: f64,
        /// Ball diagnostics: center vertex.
        #[arg(long)]
        ball_center: Option<u32>,
        /// Ball diagnostics: radius (fraction or integer).
        #[arg(long)]
        ball_radius: Option<String>,
        /// Ball diagnostics: count intersections of at least this many clusters.
        #[arg(long, default_value_t = 3)]
        ball_min_clusters: u32,
    },
    /// Spanner experiment (unweighted or weighted input).
    Spanner {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 3)]
        c_spacing: u32,
        /// Force the weighted pipeline even on unit weights.
        #[arg(long, default_value_t = false)]
        weighted: bool,
        /// Sampled stretch checks per run (weighted pipeline).
        #[arg(long, default_value_t = 200)]
        stretch_samples: u32,
        /// Write the spanner of the first seed as an artifact.
        #[arg(long)]
        artifact: Option<PathBuf>,
    },
    /// Hopset experiment.
    Hopset {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.5)]
        epsilon_prime: f64,
        #[arg(long, default_value_t = 1.5)]
        delta: f64,
        #[arg(long, default_value_t = 0.3)]
        gamma1: f64,
        #[arg(long, default_value_t = 0.6)]
        gamma2: f64,
        #[arg(long, default_value_t = 2.0)]
        k_conf: f64,
        #[arg(long, default_value_t = 100)]
        pairs: u32,
    },
    /// Build and query approximate distance oracles.
    Oracle {
        #[command(subcommand)]
        action: OracleAction,
    },
    /// Low-depth iterated hopset experiment.
    Lowdepth {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value = "1/2")]
        epsilon_prime: String,
        #[arg(long, default_value_t = 100)]
        pairs: u32,
    },
    /// Cross-check an artifact against exact oracles.
    Verify {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum OracleAction {
    Build {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "1/2")]
        epsilon_prime: String,
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[arg(long, default_value_t = 1.5)]
        delta: f64,
        #[arg(long, default_value_t = 0.3)]
        gamma1: f64,
        #[arg(long, default_value_t = 0.6)]
        gamma2: f64,
        #[arg(long, default_value_t = 3)]
        repetitions: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(short, long)]
        s: u32,
        #[arg(short, long)]
        t: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen { graph, seed, out } => {
            let g = generate_graph(&graph.spec()?, seed)?;
            write_graph_file(&out, &g)?;
            println!(
                "wrote {} ({} vertices, {} edges)",
                out.display(),
                g.vertex_count(),
                g.edge_count()
            );
            Ok(true)
        }
        Command::Cluster {
            graph,
            common,
            beta,
            mode,
            k_prime,
            ball_center,
            ball_radius,
            ball_min_clusters,
        } => {
            let mode = match mode.as_str() {
                "exact" => ClusterMode::Exact,
                "rounds" => ClusterMode::Rounds,
                other => {
                    return Err(Error::InvalidParameter(format!("unknown mode {other:?}")));
                }
            };
            let ball = match (ball_center, ball_radius) {
                (Some(center), Some(radius)) => Some(BallCheckCfg {
                    center,
                    radius: Frac::parse(&radius)?,
                    min_clusters: ball_min_clusters,
                }),
                _ => None,
            };
            let cfg = ExperimentConfig {
                graph: graph.source()?,
                kind: ExperimentKind::Cluster { beta, mode, k_prime, ball },
                seeds: common.seeds,
                base_seed: common.seed,
            };
            finish_report(&cfg, &common)
        }
        Command::Spanner {
            graph,
            common,
            k,
            c_spacing,
            weighted,
            stretch_samples,
            artifact,
        } => {
            let g = graph.load()?;
            if let Some(path) = artifact {
                let p = SpannerParams { k, c_spacing, seed: common.seed };
                let sp = if g.is_unweighted() && !weighted {
                    unweighted_spanner(&g, &p)?
                } else {
                    weighted_spanner(&g, &p)?
                };
                let wrapped = Artifact::Spanner(sp);
                std::fs::write(&path, serde_json::to_string(&wrapped)?)?;
                println!("wrote artifact {}", path.display());
            }
            let kind = if g.is_unweighted() && !weighted {
                ExperimentKind::Spanner { k, c_spacing }
            } else {
                ExperimentKind::SpannerWeighted { k, c_spacing, stretch_samples }
            };
            let cfg = ExperimentConfig {
                graph: graph.source()?,
                kind,
                seeds: common.seeds,
                base_seed: common.seed,
            };
            finish_report(&cfg, &common)
        }
        Command::Hopset {
            graph,
            common,
            epsilon_prime,
            delta,
            gamma1,
            gamma2,
            k_conf,
            pairs,
        } => {
            let cfg = ExperimentConfig {
                graph: graph.source()?,
                kind: ExperimentKind::Hopset {
                    epsilon_prime,
                    delta,
                    gamma1,
                    gamma2,
                    k_conf,
                    pairs,
                },
                seeds: common.seeds,
                base_seed: common.seed,
            };
            finish_report(&cfg, &common)
        }
        Command::Lowdepth {
            graph,
            common,
            alpha,
            epsilon_prime,
            pairs,
        } => {
            let cfg = ExperimentConfig {
                graph: graph.source()?,
                kind: ExperimentKind::LowDepth {
                    alpha,
                    epsilon_prime: Frac::parse(&epsilon_prime)?,
                    pairs,
                },
                seeds: common.seeds,
                base_seed: common.seed,
            };
            finish_report(&cfg, &common)
        }
        Command::Oracle { action } => match action {
            OracleAction::Build {
                graph,
                epsilon_prime,
                eta,
                delta,
                gamma1,
                gamma2,
                repetitions,
                seed,
                out,
            } => {
                let g = graph.load()?;
                let mut hp = HopsetParams::new(0.5, delta, gamma1, gamma2, seed);
                hp.repetitions = repetitions;
                let o = build_oracle(&g, Frac::parse(&epsilon_prime)?, eta, &hp)?;
                o.save(std::fs::File::create(&out)?)?;
                println!(
                    "wrote {} ({} query graphs, {} bundles)",
                    out.display(),
                    o.decomposition.query_graphs.len(),
                    o.bundle_count()
                );
                Ok(true)
            }
            OracleAction::Query { index, s, t, format } => {
                let o = OracleIndex::load(std::fs::File::open(&index)?)?;
                let a = query_oracle(&o, s, t)?;
                match format {
                    Format::Json => {
                        let json = serde_json::json!({
                            "s": s,
                            "t": t,
                            "distance": a.distance_f64(),
                            "exact": a.distance.map(|d| format!("{}/{}", d.numer(), d.denom())),
                            "level": a.level,
                            "scale_pow": a.scale_pow,
                            "rep": a.rep,
                            "hops_used": a.hops_used,
                            "fallback": a.fallback,
                        });
                        println!("{json}");
                    }
                    Format::Text => match a.distance {
                        Some(d) => println!(
                            "dist({s},{t}) ~= {} (exact {}/{}, level {}, hops {})",
                            a.distance_f64().unwrap(),
                            d.numer(),
                            d.denom(),
                            a.level,
                            a.hops_used
                        ),
                        None => println!("dist({s},{t}) = unreachable"),
                    },
                }
                Ok(true)
            }
        },
        Command::Verify {
            graph,
            artifact,
            samples,
            seed,
            out,
            format,
        } => {
            let g = graph.load()?;
            let art: Artifact = serde_json::from_str(&std::fs::read_to_string(&artifact)?)?;
            let rep = verify(&g, &art, samples, seed)?;
            let content = match format {
                Format::Json => serde_json::to_string_pretty(&rep)?,
                Format::Text => rep.to_text(),
            };
            emit(&out, &content)?;
            Ok(rep.passed())
        }
    }
}

fn finish_report(cfg: &ExperimentConfig, common: &CommonArgs) -> Result<bool> {
    let report = run_experiment(cfg)?;
    let content = match common.format {
        Format::Json => serde_json::to_string_pretty(&report)?,
        Format::Text => report.to_text(),
    };
    emit(&common.out, &content)?;
    Ok(report.passed())
}
