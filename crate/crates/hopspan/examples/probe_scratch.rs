// Scratch probe for acceptance margins (temporary).
use hopspan::cluster::{cluster_diagnostics, est_cluster, ClusterMode, ClusterParams};
use hopspan::generate::{generate_graph, GraphModel, GraphSpec, WeightSpec};
use hopspan::report::{run_experiment, ExperimentConfig, ExperimentKind, GraphSource, SeedMetrics};
use hopspan::util::child_seed;
use std::time::Instant;

fn main() {
    probe_lemma1();
    probe_spanner_structural();
    probe_weighted_spanner();
}

fn probe_lemma1() {
    let t0 = Instant::now();
    let g = generate_graph(
        &GraphSpec::unweighted(GraphModel::Gnm { n: 5000, m: 20000 }),
        0,
    )
    .unwrap();
    let beta = 0.1;
    let bound = (2.0 / beta) * 5000f64.ln();
    let mut diam_ok = 0;
    let mut rounds_ok = 0;
    let mut max_diam: f64 = 0.0;
    let mut max_rounds = 0u64;
    for i in 0..100u64 {
        let c = est_cluster(
            &g,
            &ClusterParams {
                beta,
                k_prime: 2.0,
                seed: child_seed(3, i),
                mode: ClusterMode::Exact,
            },
        )
        .unwrap();
        let stats = cluster_diagnostics(&g, &c);
        let d = stats.max_tree_diameter_num() as f64;
        max_diam = max_diam.max(d);
        if d <= bound {
            diam_ok += 1;
        }
        let cr = est_cluster(
            &g,
            &ClusterParams {
                beta,
                k_prime: 2.0,
                seed: child_seed(3, i),
                mode: ClusterMode::Rounds,
            },
        )
        .unwrap();
        let r = cr.round_count.unwrap();
        max_rounds = max_rounds.max(r);
        if (r as f64) <= bound {
            rounds_ok += 1;
        }
    }
    println!(
        "lemma1 in {:?}: bound {bound:.1}, diam_ok {diam_ok}/100 (max {max_diam}), rounds_ok {rounds_ok}/100 (max {max_rounds})",
        t0.elapsed()
    );
}

fn probe_spanner_structural() {
    let t0 = Instant::now();
    let cfg = ExperimentConfig {
        graph: GraphSource::Model(GraphSpec::unweighted(GraphModel::Gnm { n: 2000, m: 8000 })),
        kind: ExperimentKind::Spanner { k: 4, c_spacing: 3 },
        seeds: 100,
        base_seed: 4,
    };
    let r = run_experiment(&cfg).unwrap();
    let mut structural = 0;
    let mut within_4k2 = 0;
    let mut max_d = 0u64;
    for m in &r.per_seed {
        if let SeedMetrics::Spanner { structural_ok, max_edge_dist_hops, .. } = m {
            if *structural_ok {
                structural += 1;
            }
            if *max_edge_dist_hops <= 4 * 4 + 2 {
                within_4k2 += 1;
            }
            max_d = max_d.max(*max_edge_dist_hops);
        }
    }
    println!(
        "spanner k=4 in {:?}: structural {structural}/100, <=4k+2 {within_4k2}/100, max_edge_dist {max_d}; checks: {}",
        t0.elapsed(),
        r.to_text().replace('\n', " | ")
    );
}

fn probe_weighted_spanner() {
    let t0 = Instant::now();
    let cfg = ExperimentConfig {
        graph: GraphSource::Model(GraphSpec {
            model: GraphModel::Gnm { n: 1000, m: 5000 },
            weights: Some(WeightSpec { min: 1, max: 1 << 20 }),
        }),
        kind: ExperimentKind::SpannerWeighted {
            k: 4,
            c_spacing: 3,
            stretch_samples: 200,
        },
        seeds: 20,
        base_seed: 6,
    };
    let r = run_experiment(&cfg).unwrap();
    let max_stretch = r
        .per_seed
        .iter()
        .map(|m| match m {
            SeedMetrics::SpannerWeighted { max_stretch, .. } => *max_stretch,
            _ => 0.0,
        })
        .fold(0.0, f64::max);
    println!(
        "weighted spanner in {:?}: max sampled stretch {max_stretch:.1} (32k = {}), {}",
        t0.elapsed(),
        32 * 4,
        r.to_text().replace('\n', " | ")
    );
}
