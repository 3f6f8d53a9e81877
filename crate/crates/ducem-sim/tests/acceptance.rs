//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! The heavyweight ensembles are computed once and shared between the
//! criteria that consume them.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ducem_sim::channel::{self, ChannelParams, UserField};
use ducem_sim::ducem::{
    run_ducem_with_diagnostics, DucemConfig, DucemError, RunDiagnostics, SolutionRecord,
    SIGMA_STEP_SLACK,
};
use ducem_sim::em::{self, Cov2, GmmComponent, GmmParams};
use ducem_sim::geo::{Rect, Vec2};
use ducem_sim::harness::{
    emit_outputs, run_experiment, summarize, Algorithm, ExperimentSpec, ScenarioSource,
    EE_PLOT_CSV, LREL_PLOT_CSV, ROWS_CSV,
};
use ducem_sim::kmeans::{
    kmeanspp_init, lloyd_cluster, run_kmeans_with_diagnostics, KmeansConfig,
};
use ducem_sim::metrics;
use ducem_sim::mobility::{generate_trace, rpgm_member_step, MobilityConfig};

fn verdict(number: u32, name: &str, ok: bool, details: &str) {
    println!(
        "criterion {number} ({name}): {} — {details}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {number} ({name}) failed: {details}");
}

// ---------------------------------------------------------------------------
// Shared ensemble for criteria 1, 7, and 8: 200 random scenarios, both
// solvers, with full diagnostics.
// ---------------------------------------------------------------------------

struct SoundnessCase {
    users: UserField,
    u_max: usize,
    ducem: Result<(SolutionRecord, RunDiagnostics), String>,
    kmeans: Result<SolutionRecord, String>,
    d_sigma_max: f64,
    sigma_max: f64,
}

struct SoundnessEnsemble {
    cases: Vec<SoundnessCase>,
    params: ChannelParams,
    elapsed: Duration,
}

fn soundness_ensemble() -> &'static SoundnessEnsemble {
    static ENSEMBLE: OnceLock<SoundnessEnsemble> = OnceLock::new();
    ENSEMBLE.get_or_init(|| {
        let started = Instant::now();
        let params = ChannelParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
        let mut cases = Vec::with_capacity(200);
        for i in 0..200u64 {
            // Alternate uniform fields and group-mobility snapshots, with
            // user counts spanning the required range.
            let users = if i % 2 == 0 {
                let n = rng.random_range(20..=500);
                let area = Rect::square(1200.0);
                let mut scenario_rng = ChaCha8Rng::seed_from_u64(i);
                UserField::new((0..n).map(|_| area.sample(&mut scenario_rng)).collect())
                    .expect("nonempty")
            } else {
                let groups = rng.random_range(1..=10usize);
                let members = rng.random_range(4..=(500 / groups).saturating_sub(1).max(4));
                let mobility = MobilityConfig {
                    n_groups: groups,
                    members_per_group: members.min(499),
                    duration: 30.0,
                    rng_seed: i,
                    ..MobilityConfig::default()
                };
                let trace = generate_trace(&mobility).expect("valid mobility config");
                trace.last().unwrap().to_user_field().unwrap()
            };
            let n = users.len();
            let users = if (20..=500).contains(&n) {
                users
            } else {
                // Clamp group scenarios into range by resampling uniformly.
                let n = n.clamp(20, 500);
                let area = Rect::square(1200.0);
                let mut scenario_rng = ChaCha8Rng::seed_from_u64(i ^ 0x5eed);
                UserField::new((0..n).map(|_| area.sample(&mut scenario_rng)).collect()).unwrap()
            };
            cases.push(run_case(users, i, &params, &mut rng));
        }
        SoundnessEnsemble {
            cases,
            params,
            elapsed: started.elapsed(),
        }
    })
}

fn run_case(
    users: UserField,
    seed: u64,
    params: &ChannelParams,
    rng: &mut ChaCha8Rng,
) -> SoundnessCase {
    let u_max = [20, 50, 100][rng.random_range(0..3usize)];
    let ducem_config = DucemConfig {
        u_max,
        rng_seed: seed,
        // Safety bound trimmed for ensemble runtime; solutions appear during
        // the fleet ramp long before it trips.
        max_iterations: 1200,
        ..DucemConfig::default()
    };
    let kmeans_config = KmeansConfig {
        u_max,
        rng_seed: seed,
        ..KmeansConfig::default()
    };
    SoundnessCase {
        ducem: run_ducem_with_diagnostics(&users, &ducem_config, params)
            .map_err(|e| e.to_string()),
        kmeans: run_kmeans_with_diagnostics(&users, &kmeans_config, params)
            .map(|(record, _)| record)
            .map_err(|e| e.to_string()),
        users,
        u_max,
        d_sigma_max: ducem_config.d_sigma_max,
        sigma_max: ducem_config.sigma_max,
    }
}

#[test]
fn criterion_1_constraint_soundness() {
    // Every feasible returned solution must replay the SNR, capacity, and
    // power constraints with zero violations.
    let ensemble = soundness_ensemble();
    let mut feasible = 0usize;
    let mut violations = 0usize;
    let mut checked_cases = 0usize;
    for (i, case) in ensemble.cases.iter().enumerate() {
        checked_cases += 1;
        let users = rebuild_case_users(i as u64);
        for record in [
            case.ducem.as_ref().ok().map(|(r, _)| r),
            case.kmeans.as_ref().ok(),
        ]
        .into_iter()
        .flatten()
        {
            assert!(record.feasible, "returned solutions must claim feasibility");
            feasible += 1;
            let report = metrics::check_constraints(
                &record.fleet,
                &record.assignment,
                &users,
                &ensemble.params,
                case.u_max,
                1.0,
            );
            if !report.all_ok() {
                violations += 1;
                eprintln!(
                    "case {i}: U={} u_max={} replay failed: {report:?}",
                    case.users, case.u_max
                );
            }
        }
    }
    let within_budget = ensemble.elapsed < Duration::from_secs(600);
    verdict(
        1,
        "constraint soundness",
        violations == 0 && feasible > checked_cases && within_budget,
        &format!(
            "{checked_cases} scenarios, {feasible} feasible solutions, {violations} replay violations, ensemble took {:.1} s (budget 600 s)",
            ensemble.elapsed.as_secs_f64()
        ),
    );
}

/// Rebuild the user field for soundness case `i`, re-deriving the same seeds
/// the ensemble constructor used, so the replay is independent of the records
/// the solvers returned.
fn rebuild_case_users(index: u64) -> UserField {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    for i in 0..=index {
        let users = if i % 2 == 0 {
            let n = rng.random_range(20..=500);
            let area = Rect::square(1200.0);
            let mut scenario_rng = ChaCha8Rng::seed_from_u64(i);
            UserField::new((0..n).map(|_| area.sample(&mut scenario_rng)).collect()).unwrap()
        } else {
            let groups = rng.random_range(1..=10usize);
            let members = rng.random_range(4..=(500 / groups).saturating_sub(1).max(4));
            let mobility = MobilityConfig {
                n_groups: groups,
                members_per_group: members.min(499),
                duration: 30.0,
                rng_seed: i,
                ..MobilityConfig::default()
            };
            let trace = generate_trace(&mobility).unwrap();
            trace.last().unwrap().to_user_field().unwrap()
        };
        let n = users.len();
        let users = if !(20..=500).contains(&n) {
            let n = n.clamp(20, 500);
            let area = Rect::square(1200.0);
            let mut scenario_rng = ChaCha8Rng::seed_from_u64(i ^ 0x5eed);
            UserField::new((0..n).map(|_| area.sample(&mut scenario_rng)).collect()).unwrap()
        } else {
            users
        };
        // Burn the u_max draw to stay aligned with the ensemble stream.
        let _ = rng.random_range(0..3usize);
        if i == index {
            return users;
        }
    }
    unreachable!()
}

#[test]
fn criterion_2_em_monotonicity() {
    // 100 random mixtures, 50 unmodified EM iterations each; the total
    // log-likelihood may never drop by more than the 1e-9 slack.
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut fixtures = 0;
    let mut steps_checked = 0usize;
    let mut worst_drop = 0.0f64;
    while fixtures < 100 {
        let n = rng.random_range(5..=200usize);
        let m = rng.random_range(1..=5usize);
        let area = Rect::square(1200.0);
        let pts: Vec<Vec2> = (0..n).map(|_| area.sample(&mut rng)).collect();
        let data = UserField::new(pts.clone()).unwrap();
        // Seed component means on data points so no component starts empty.
        let mut weights: Vec<f64> = (0..m).map(|_| 0.2 + rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let components = weights
            .into_iter()
            .map(|weight| GmmComponent {
                weight,
                mean: pts[rng.random_range(0..n)],
                cov: Cov2::isotropic(100.0 + rng.random::<f64>() * 40_000.0),
            })
            .collect();
        let mut params = GmmParams::new(components).unwrap();
        fixtures += 1;

        let mut before = em::log_likelihood(&data, &params).unwrap();
        for _ in 0..50 {
            let resp = em::e_step(&data, &params).unwrap();
            params = match em::m_step(&data, &resp) {
                Ok(p) => p,
                Err(em::EmError::EmptyComponent { .. }) => break,
                Err(e) => panic!("unexpected EM failure: {e}"),
            };
            let after = em::log_likelihood(&data, &params).unwrap();
            worst_drop = worst_drop.max(before - after);
            steps_checked += 1;
            assert!(
                after >= before - 1e-9,
                "log-likelihood dropped {before} -> {after}"
            );
            before = after;
        }
    }
    verdict(
        2,
        "EM monotonicity",
        fixtures == 100 && worst_drop <= 1e-9,
        &format!("{fixtures} fixtures, {steps_checked} EM steps, worst drop {worst_drop:.3e}"),
    );
}

#[test]
fn criterion_3_kmeans_em_equivalence() {
    // Lloyd iterations must reproduce hard-assignment EM with a shared
    // spherical covariance and uniform weights, fixture by fixture.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut matched = 0usize;
    for fixture in 0..50u64 {
        let n = rng.random_range(8..=60usize);
        let k = rng.random_range(2..=5usize).min(n);
        let area = Rect::square(1000.0);
        let pts: Vec<Vec2> = (0..n).map(|_| area.sample(&mut rng)).collect();
        let users = UserField::new(pts.clone()).unwrap();
        let seed = 1000 + fixture;

        let (_, w) = lloyd_cluster(&users, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let lloyd_labels: Vec<usize> = (0..n).map(|u| w.serving(u)).collect();

        // Hard EM from the same seeded initialization.
        let mut em_rng = ChaCha8Rng::seed_from_u64(seed);
        let mut centers = kmeanspp_init(&users, k, &mut em_rng).unwrap();
        let mut labels = vec![usize::MAX; n];
        for _ in 0..1000 {
            let gmm = GmmParams::new(
                centers
                    .iter()
                    .map(|&mean| GmmComponent {
                        weight: 1.0 / k as f64,
                        mean,
                        cov: Cov2::isotropic(2500.0),
                    })
                    .collect(),
            )
            .unwrap();
            let resp = em::e_step(&users, &gmm).unwrap();
            let new_labels: Vec<usize> = (0..n).map(|t| resp.argmax_component(t)).collect();
            if new_labels == labels {
                break;
            }
            labels = new_labels;
            let mut sums = vec![Vec2::ZERO; k];
            let mut counts = vec![0usize; k];
            for (t, &j) in labels.iter().enumerate() {
                sums[j] = sums[j] + pts[t];
                counts[j] += 1;
            }
            for j in 0..k {
                if counts[j] > 0 {
                    centers[j] = sums[j] * (1.0 / counts[j] as f64);
                } else {
                    // Farthest-point reseed, mirroring the Lloyd rule.
                    let far = (0..n)
                        .max_by(|&a, &b| {
                            let da = nearest_sq(&centers, pts[a]);
                            let db = nearest_sq(&centers, pts[b]);
                            da.partial_cmp(&db).unwrap()
                        })
                        .unwrap();
                    centers[j] = pts[far];
                }
            }
        }
        if labels == lloyd_labels {
            matched += 1;
        } else {
            eprintln!("fixture {fixture}: partitions differ");
        }
    }
    verdict(
        3,
        "k-means/EM equivalence",
        matched == 50,
        &format!("{matched}/50 fixtures produced identical partitions"),
    );
}

fn nearest_sq(centers: &[Vec2], p: Vec2) -> f64 {
    centers
        .iter()
        .map(|c| c.dist_sq(p))
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// Shared ensemble for criteria 4 and 5: paired comparison on the default
// mass-event mobility scenarios.
// ---------------------------------------------------------------------------

struct ComparisonEnsemble {
    summary: ducem_sim::harness::Summary,
    rows: usize,
    elapsed: Duration,
}

fn comparison_ensemble() -> &'static ComparisonEnsemble {
    static ENSEMBLE: OnceLock<ComparisonEnsemble> = OnceLock::new();
    ENSEMBLE.get_or_init(|| {
        let started = Instant::now();
        let spec = ExperimentSpec {
            name: "acceptance-comparison".into(),
            source: ScenarioSource::Rpgm {
                mobility: MobilityConfig::default(),
                snapshot_index: 60,
            },
            ensemble: 40,
            base_seed: 2025,
            algorithms: vec![Algorithm::Ducem, Algorithm::Kmeans],
            u_max_sweep: vec![20, 50, 100],
            gamma_th_sweep_db: vec![0.0, 3.0, 6.0, 9.0, 12.0],
            channel: ChannelParams::default(),
            ducem: DucemConfig::default(),
            kmeans: KmeansConfig::default(),
            time_limit: Duration::from_secs(300),
            capture_solutions: false,
        };
        let rows = run_experiment(&spec).expect("experiment must complete");
        let summary = summarize(&rows);
        ComparisonEnsemble {
            summary,
            rows: rows.len(),
            elapsed: started.elapsed(),
        }
    })
}

#[test]
fn criterion_4_headline_energy_efficiency() {
    // Paired EE improvement of the EM clustering over the constrained
    // k-means baseline: mean positive and at least +10%, with the published
    // 25% figure inside the observed range of at least one u_max cell.
    let ensemble = comparison_ensemble();
    let overall = ensemble
        .summary
        .overall_ee_improvement
        .as_ref()
        .expect("paired rows exist");
    let range_covers_25 = ensemble
        .summary
        .ee_improvement
        .iter()
        .any(|imp| imp.stats.min_pct <= 25.0 && 25.0 <= imp.stats.max_pct);
    let per_cell: Vec<String> = ensemble
        .summary
        .ee_improvement
        .iter()
        .map(|imp| {
            format!(
                "u_max={}: {:+.1}% [{:+.1}%, {:+.1}%]",
                imp.u_max, imp.stats.mean_pct, imp.stats.min_pct, imp.stats.max_pct
            )
        })
        .collect();
    let within_budget = ensemble.elapsed < Duration::from_secs(1800);
    verdict(
        4,
        "headline EE comparison",
        overall.mean_pct > 0.0 && overall.mean_pct >= 10.0 && range_covers_25 && within_budget,
        &format!(
            "{} rows in {:.1} s; overall paired improvement {:+.1}% over {} pairs; cells: {}; 25% in range: {range_covers_25}",
            ensemble.rows,
            ensemble.elapsed.as_secs_f64(),
            overall.mean_pct,
            overall.n_pairs,
            per_cell.join("; ")
        ),
    );
}

#[test]
fn criterion_5_headline_link_reliability() {
    // Reliability must improve at every threshold (paired difference in
    // percentage points, which keeps zero-baseline pairs countable), and by
    // at least 5% relative at the median threshold, matching how the
    // published comparison states its reliability gain.
    let ensemble = comparison_ensemble();
    let improvements = &ensemble.summary.lrel_improvement;
    assert_eq!(improvements.len(), 5, "one entry per swept threshold");
    let all_positive = improvements.iter().all(|imp| imp.points.mean_pct > 0.0);
    let median = &improvements[2];
    assert_eq!(median.gamma_th_db, 6.0);
    let median_relative = median
        .relative_pct
        .as_ref()
        .map(|s| s.mean_pct)
        .unwrap_or(f64::NEG_INFINITY);
    let detail: Vec<String> = improvements
        .iter()
        .map(|imp| {
            format!(
                "{} dB: {:+.2} pts / {}",
                imp.gamma_th_db,
                imp.points.mean_pct,
                imp.relative_pct
                    .as_ref()
                    .map(|r| format!("{:+.1}% rel", r.mean_pct))
                    .unwrap_or_else(|| "n/a".into())
            )
        })
        .collect();
    verdict(
        5,
        "headline link reliability",
        all_positive && median_relative >= 5.0,
        &format!(
            "all thresholds positive: {all_positive}; median (6 dB) relative {median_relative:+.1}%; {}",
            detail.join("; ")
        ),
    );
}

#[test]
fn criterion_6_single_user_closed_form() {
    let started = Instant::now();
    let params = ChannelParams::default();
    let users = UserField::new(vec![Vec2::new(700.0, 300.0)]).unwrap();

    // Independent oracle: direct formula evaluation, plus the SNR round trip.
    let expected_power =
        params.snr_target * params.noise_power * params.altitude.powf(params.pathloss_exponent)
            / params.ref_gain;
    let round_trip = channel::snr(
        expected_power,
        channel::channel_gain(params.altitude, &params),
        &params,
    );
    assert!((round_trip - params.snr_target).abs() <= 1e-12 * params.snr_target);
    let expected_ee = params.bandwidth_per_user * (params.snr_target.ln_1p() / std::f64::consts::LN_2)
        / expected_power;

    let ducem_config = DucemConfig {
        u_max: 10,
        rng_seed: 6,
        ..DucemConfig::default()
    };
    let (ducem_record, _) = run_ducem_with_diagnostics(&users, &ducem_config, &params).unwrap();
    let kmeans_config = KmeansConfig {
        u_max: 10,
        rng_seed: 6,
        ..KmeansConfig::default()
    };
    let (kmeans_record, _) = run_kmeans_with_diagnostics(&users, &kmeans_config, &params).unwrap();

    let mut ok = true;
    let mut notes = Vec::new();
    for (name, record) in [("ducem", &ducem_record), ("kmeans", &kmeans_record)] {
        let single = record.num_drones() == 1;
        let above = record.fleet[0].mean == Vec2::new(700.0, 300.0);
        let power_ok =
            (record.fleet[0].power - expected_power).abs() <= 1e-12 * expected_power;
        let ee_ok = (record.ee_score - expected_ee).abs() <= 1e-9 * expected_ee;
        ok &= single && above && power_ok && ee_ok;
        notes.push(format!(
            "{name}: M={} above={above} P={:.6e} W (expected {:.6e}) ee_ok={ee_ok}",
            record.num_drones(),
            record.fleet[0].power,
            expected_power
        ));
    }
    let elapsed = started.elapsed();
    verdict(
        6,
        "single-user closed form",
        ok && elapsed < Duration::from_secs(1),
        &format!("{} ({:.3} s)", notes.join("; "), elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_7_sigma_clamp() {
    // No instrumented run may grow a covariance faster than the rate limit
    // or past the cap; the run loop also debug-asserts this per iteration.
    let ensemble = soundness_ensemble();
    let mut runs = 0usize;
    let mut worst_step = 0.0f64;
    let mut worst_sigma = 0.0f64;
    let mut ok = true;
    for case in &ensemble.cases {
        if let Ok((_, diag)) = &case.ducem {
            runs += 1;
            worst_step = worst_step.max(diag.max_sigma_step);
            worst_sigma = worst_sigma.max(diag.max_sigma_seen);
            ok &= diag.max_sigma_step <= case.d_sigma_max + SIGMA_STEP_SLACK;
            ok &= diag.max_sigma_seen <= case.sigma_max;
        }
    }
    verdict(
        7,
        "covariance rate limit and cap",
        ok && runs > 0,
        &format!(
            "{runs} instrumented runs; max per-iteration increase {worst_step:.6} (limit 0.1), max sigma {worst_sigma:.1}"
        ),
    );
}

#[test]
fn criterion_8_pigeonhole_drone_count() {
    let ensemble = soundness_ensemble();
    let mut checked = 0usize;
    let mut ok = true;
    for case in &ensemble.cases {
        let bound = case.users.div_ceil(case.u_max);
        for record in [
            case.ducem.as_ref().ok().map(|(r, _)| r),
            case.kmeans.as_ref().ok(),
        ]
        .into_iter()
        .flatten()
        {
            checked += 1;
            if record.num_drones() < bound {
                ok = false;
                eprintln!(
                    "U={} u_max={}: M={} below pigeonhole bound {bound}",
                    case.users,
                    case.u_max,
                    record.num_drones()
                );
            }
        }
    }
    verdict(
        8,
        "pigeonhole drone count",
        ok && checked > 0,
        &format!("{checked} feasible solutions all satisfy M >= ceil(U/u_max)"),
    );
}

#[test]
fn criterion_9_harness_determinism() {
    let spec = ExperimentSpec {
        name: "acceptance-determinism".into(),
        source: ScenarioSource::Rpgm {
            mobility: MobilityConfig {
                n_groups: 3,
                members_per_group: 15,
                duration: 20.0,
                ..MobilityConfig::default()
            },
            snapshot_index: 20,
        },
        ensemble: 3,
        base_seed: 99,
        algorithms: vec![Algorithm::Ducem, Algorithm::Kmeans],
        u_max_sweep: vec![10, 25],
        gamma_th_sweep_db: vec![0.0, 6.0, 12.0],
        channel: ChannelParams::default(),
        ducem: DucemConfig {
            max_iterations: 1500,
            ..DucemConfig::default()
        },
        kmeans: KmeansConfig::default(),
        time_limit: Duration::from_secs(300),
        capture_solutions: false,
    };
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let rows = run_experiment(&spec).unwrap();
        let summary = summarize(&rows);
        emit_outputs(&rows, &summary, dir.path()).unwrap();
    }
    let mut ok = true;
    let mut sizes = Vec::new();
    for file in [ROWS_CSV, EE_PLOT_CSV, LREL_PLOT_CSV] {
        let a = std::fs::read(dir_a.path().join(file)).unwrap();
        let b = std::fs::read(dir_b.path().join(file)).unwrap();
        ok &= a == b;
        sizes.push(format!("{file}: {} bytes", a.len()));
    }
    verdict(
        9,
        "harness determinism",
        ok,
        &format!("byte-identical CSV outputs across reruns ({})", sizes.join(", ")),
    );
}

#[test]
fn criterion_10_mobility_deviation_bounds() {
    let config = MobilityConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut pos = Vec2::new(600.0, 600.0);
    let mut ok = true;
    let mut max_speed_dev = 0.0f64;
    let mut max_angle_dev = 0.0f64;
    for step in 0..10_000 {
        let leader_speed = 0.5 + (step % 11) as f64 * 0.15;
        let leader_heading = (step % 17) as f64 * 0.37;
        let mv = rpgm_member_step(pos, leader_speed, leader_heading, &config, &mut rng, 1.0);
        let speed_dev = mv.speed - leader_speed;
        let angle_dev = mv.heading - leader_heading;
        max_speed_dev = max_speed_dev.max(speed_dev);
        max_angle_dev = max_angle_dev.max(angle_dev);
        ok &= speed_dev >= 0.0 && speed_dev <= config.phi_v * config.dv_max;
        ok &= (0.0..=config.phi_theta * config.dtheta_max).contains(&angle_dev);
        pos = mv.position;
    }
    verdict(
        10,
        "mobility deviation bounds",
        ok,
        &format!(
            "10000 steps; speed deviation within [0, {:.2}] (max seen {:.4}), angle deviation within [0, {:.4}] (max seen {:.4})",
            config.phi_v * config.dv_max,
            max_speed_dev,
            config.phi_theta * config.dtheta_max,
            max_angle_dev
        ),
    );
}
