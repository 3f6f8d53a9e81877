//! Quick paired comparison over a few RPGM scenarios; development aid.

use std::time::Instant;

use ducem_sim::channel::ChannelParams;
use ducem_sim::ducem::{run_ducem_with_diagnostics, DucemConfig};
use ducem_sim::kmeans::{run_kmeans_baseline, KmeansConfig};
use ducem_sim::mobility::{generate_trace, MobilityConfig};

fn main() {
    let params = ChannelParams::default();
    let ensemble: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5);
    let max_iterations: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10_000);
    let n_groups: usize = std::env::args()
        .nth(3)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let members_per_group: usize = std::env::args()
        .nth(4)
        .and_then(|s| s.parse().ok())
        .unwrap_or(9);
    let spawn_radius: f64 = std::env::args()
        .nth(5)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20.0);

    for u_max in [20usize, 50, 100] {
        let mut improvements = Vec::new();
        let mut ducem_time = 0.0;
        let mut kmeans_time = 0.0;
        let mut m_ducem_total = 0;
        let mut m_kmeans_total = 0;
        let mut iters_total = 0usize;
        for seed in 0..ensemble as u64 {
            let mobility = MobilityConfig {
                rng_seed: seed,
                n_groups,
                members_per_group,
                spawn_radius,
                ..MobilityConfig::default()
            };
            let trace = generate_trace(&mobility).unwrap();
            let users = trace.last().unwrap().to_user_field().unwrap();

            let dcfg = DucemConfig {
                u_max,
                rng_seed: seed,
                max_iterations,
                ..DucemConfig::default()
            };
            let t0 = Instant::now();
            let ducem = run_ducem_with_diagnostics(&users, &dcfg, &params);
            ducem_time += t0.elapsed().as_secs_f64();

            let kcfg = KmeansConfig {
                u_max,
                rng_seed: seed,
                ..KmeansConfig::default()
            };
            let t1 = Instant::now();
            let kmeans = run_kmeans_baseline(&users, &kcfg, &params);
            kmeans_time += t1.elapsed().as_secs_f64();

            match (&ducem, &kmeans) {
                (Ok((d, diag)), Ok(k)) => {
                    let imp = 100.0 * (d.ee_score - k.ee_score) / k.ee_score;
                    improvements.push(imp);
                    m_ducem_total += d.num_drones();
                    m_kmeans_total += k.num_drones();
                    iters_total += diag.iterations;
                    println!(
                        "u_max={u_max:4} seed={seed} ducem: M={:3} ee={:.3e} (iters {:5}, found at {:5}) | kmeans: M={:3} ee={:.3e} | improvement {imp:+.1}%",
                        d.num_drones(),
                        d.ee_score,
                        diag.iterations,
                        d.iteration_found,
                        k.num_drones(),
                        k.ee_score
                    );
                }
                (d, k) => {
                    println!(
                        "u_max={u_max:4} seed={seed} ducem_ok={} kmeans_ok={}",
                        d.is_ok(),
                        k.is_ok()
                    );
                }
            }
        }
        if !improvements.is_empty() {
            let mean = improvements.iter().sum::<f64>() / improvements.len() as f64;
            let min = improvements.iter().copied().fold(f64::INFINITY, f64::min);
            let max = improvements.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            println!(
                "== u_max={u_max}: mean improvement {mean:+.1}% (range [{min:+.1}%, {max:+.1}%]), mean M ducem {:.1} / kmeans {:.1}, mean iters {:.0}, ducem {:.2}s kmeans {:.2}s",
                m_ducem_total as f64 / improvements.len() as f64,
                m_kmeans_total as f64 / improvements.len() as f64,
                iters_total as f64 / improvements.len() as f64,
                ducem_time,
                kmeans_time,
            );
        }
    }
}
