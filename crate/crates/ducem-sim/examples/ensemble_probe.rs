//! Run a small paired ensemble through the real harness and print the
//! summary comparison. Development aid.

use std::time::Duration;

use ducem_sim::channel::ChannelParams;
use ducem_sim::ducem::DucemConfig;
use ducem_sim::harness::{
    run_experiment, summarize, Algorithm, ExperimentSpec, ScenarioSource,
};
use ducem_sim::kmeans::KmeansConfig;
use ducem_sim::mobility::MobilityConfig;

fn main() {
    let ensemble: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    let n_groups: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5);
    let members: usize = std::env::args()
        .nth(3)
        .and_then(|s| s.parse().ok())
        .unwrap_or(39);
    let max_iterations: usize = std::env::args()
        .nth(4)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10_000);

    let spec = ExperimentSpec {
        name: "probe".into(),
        source: ScenarioSource::Rpgm {
            mobility: MobilityConfig {
                n_groups,
                members_per_group: members,
                ..MobilityConfig::default()
            },
            snapshot_index: 60,
        },
        ensemble,
        base_seed: 1000,
        algorithms: vec![Algorithm::Ducem, Algorithm::Kmeans],
        u_max_sweep: vec![20, 50, 100],
        gamma_th_sweep_db: vec![0.0, 3.0, 6.0, 9.0, 12.0],
        channel: ChannelParams::default(),
        ducem: DucemConfig {
            max_iterations,
            ..DucemConfig::default()
        },
        kmeans: KmeansConfig::default(),
        time_limit: Duration::from_secs(300),
        capture_solutions: false,
    };
    let started = std::time::Instant::now();
    let rows = run_experiment(&spec).unwrap();
    let summary = summarize(&rows);
    println!("total wall time: {:.1} s", started.elapsed().as_secs_f64());
    for imp in &summary.ee_improvement {
        println!(
            "EE  u_max={:4}: n={:2} mean {:+8.1}% ci [{:+8.1}%, {:+8.1}%] range [{:+8.1}%, {:+8.1}%]",
            imp.u_max,
            imp.stats.n_pairs,
            imp.stats.mean_pct,
            imp.stats.ci95_lo,
            imp.stats.ci95_hi,
            imp.stats.min_pct,
            imp.stats.max_pct
        );
    }
    if let Some(o) = &summary.overall_ee_improvement {
        println!(
            "EE  overall:    n={:2} mean {:+8.1}% ci [{:+8.1}%, {:+8.1}%]",
            o.n_pairs, o.mean_pct, o.ci95_lo, o.ci95_hi
        );
    }
    for imp in &summary.lrel_improvement {
        let rel = imp
            .relative_pct
            .as_ref()
            .map(|r| format!("rel {:+7.2}% (n={})", r.mean_pct, r.n_pairs))
            .unwrap_or_default();
        println!(
            "Lrel gamma={:4} dB: n={:2} points {:+7.2} ci [{:+7.2}, {:+7.2}] {}",
            imp.gamma_th_db,
            imp.points.n_pairs,
            imp.points.mean_pct,
            imp.points.ci95_lo,
            imp.points.ci95_hi,
            rel
        );
    }
    for s in &summary.algorithm_stats {
        println!(
            "{}: rows {} feasible {} mean_rt {:.2}s max_rt {:.2}s",
            s.algorithm, s.rows, s.feasible, s.mean_runtime_s, s.max_runtime_s
        );
    }
}
