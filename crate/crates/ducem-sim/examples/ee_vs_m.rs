//! Probe: how does energy efficiency scale with the cluster count at a fixed
//! scenario? Development aid.

use ducem_sim::channel::ChannelParams;
use ducem_sim::kmeans::{run_kmeans_baseline, KmeansConfig, StartK};
use ducem_sim::mobility::{generate_trace, MobilityConfig};

fn main() {
    let params = ChannelParams::default();
    let mobility = MobilityConfig::default();
    let trace = generate_trace(&mobility).unwrap();
    let users = trace.last().unwrap().to_user_field().unwrap();

    for k in [1usize, 2, 3, 4, 5, 6, 8, 10, 12, 14, 16, 20, 25, 30, 40, 60, 90] {
        let cfg = KmeansConfig {
            u_max: 200,
            start_k: StartK::Fixed(k),
            rng_seed: 1,
            ..KmeansConfig::default()
        };
        match run_kmeans_baseline(&users, &cfg, &params) {
            Ok(record) => println!(
                "k={k:3} -> M={:3} ee={:.4e}",
                record.num_drones(),
                record.ee_score
            ),
            Err(e) => println!("k={k:3} -> error: {e}"),
        }
    }
}
