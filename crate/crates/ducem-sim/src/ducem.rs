//! DUCEM: drone-user clustering via a modified EM loop.
//!
//! Per iteration: EM posterior/parameter updates with an isotropic covariance
//! per drone, rate-limited and capped covariance growth, SED-based hard user
//! assignment, drone recentering on served users, SNR-target power sizing,
//! incremental drone addition while no feasible configuration exists, and
//! best-energy-efficiency solution tracking across all iterates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{
    self, Assignment, ChannelError, ChannelParams, DroneState, UserField,
};
use crate::em::{self, Cov2, EmError, GmmComponent, GmmParams, EMPTY_COMPONENT_TOL};
use crate::geo::{Rect, Vec2};

/// Absolute slack on the per-iteration sigma increase, covering the rounding
/// of `sigma_old + d_sigma_max` at area-scale variances.
pub const SIGMA_STEP_SLACK: f64 = 1e-9;

/// Smallest covariance value a drone may hold, (h/5)².
///
/// Two pressures meet here. Without a floor, a drone that locks onto a
/// single user collapses its sigma toward zero, its SED blows up (the 3-D
/// distance never drops below h), and it can never serve a user again. A
/// floor as large as h², though, freezes sigma across dense gatherings whose
/// spread sits below it, disabling the capacity-gated reach competition that
/// balances load between neighboring drones.
pub fn sigma_floor(params: &ChannelParams) -> f64 {
    let s = params.altitude / 5.0;
    s * s
}

#[derive(Debug, Error)]
pub enum DucemError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no feasible solution within the safety bounds ({iterations} iterations, {drones} drones)")]
    NoFeasibleSolution {
        iterations: usize,
        drones: usize,
        /// Last iterate, kept for diagnostics; never feasible.
        last: Option<Box<SolutionRecord>>,
    },
    #[error("cannot add a drone beyond the safety bound of {max_drones}")]
    MaxDronesExceeded { max_drones: usize },
    #[error(transparent)]
    Em(#[from] EmError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Tunables for the clustering loop. All thresholds are exposed because the
/// published description leaves them open (see README notes on ε₁/ε₂).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DucemConfig {
    /// Maximum users a single drone may serve (constraint b).
    pub u_max: usize,
    /// Maximum transmit power per drone, watts (constraint c).
    pub p_max: f64,
    /// Hard cap on the covariance value Σ_j (m²).
    pub sigma_max: f64,
    /// Maximum per-iteration increase of Σ_j (m²). Decreases are unlimited.
    pub d_sigma_max: f64,
    /// Convergence threshold ε₁ on the largest parameter change.
    pub eps1: f64,
    /// Near-convergence threshold ε₂ gating drone addition. The loop needs
    /// ε₂ to trip while ε₁ has not, so the default keeps ε₂ > ε₁; it must
    /// also exceed `d_sigma_max`, because a covariance growing at the rate
    /// limit contributes exactly `d_sigma_max` to the parameter change every
    /// iteration and would otherwise block drone addition indefinitely.
    pub eps2: f64,
    /// Safety bound on loop iterations.
    pub max_iterations: usize,
    /// Safety bound on fleet size; clamped to the user count at run time.
    pub max_drones: usize,
    pub rng_seed: u64,
}

impl Default for DucemConfig {
    fn default() -> Self {
        DucemConfig {
            u_max: 100,
            p_max: 1.0,
            sigma_max: 600.0 * 600.0,
            d_sigma_max: 0.1,
            eps1: 1e-3,
            eps2: 0.2,
            max_iterations: 10_000,
            max_drones: usize::MAX,
            rng_seed: 0,
        }
    }
}

impl DucemConfig {
    pub fn validate(&self) -> Result<(), DucemError> {
        if self.u_max < 1 {
            return Err(DucemError::InvalidConfig("u_max must be >= 1".into()));
        }
        for (v, name) in [
            (self.p_max, "p_max"),
            (self.sigma_max, "sigma_max"),
            (self.d_sigma_max, "d_sigma_max"),
            (self.eps1, "eps1"),
            (self.eps2, "eps2"),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(DucemError::InvalidConfig(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.max_iterations == 0 || self.max_drones == 0 {
            return Err(DucemError::InvalidConfig(
                "safety bounds must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// A complete candidate deployment with its energy-efficiency score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub fleet: Vec<DroneState>,
    pub assignment: Assignment,
    /// Energy efficiency in bits/joule.
    pub ee_score: f64,
    /// Loop iteration at which this candidate was produced.
    pub iteration_found: usize,
    pub feasible: bool,
}

impl SolutionRecord {
    pub fn num_drones(&self) -> usize {
        self.fleet.len()
    }
}

/// Aggregate per-run instrumentation, mainly for invariant checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub iterations: usize,
    pub final_drone_count: usize,
    pub drones_added: usize,
    /// Largest single-iteration increase of any Σ_j (m²).
    pub max_sigma_step: f64,
    /// Largest Σ_j observed at any point of the run (m²).
    pub max_sigma_seen: f64,
    /// Iterations whose configuration satisfied all constraints.
    pub feasible_iterations: usize,
}

/// Standardized Euclidean distance of Eq-style assignment: 3-D drone-user
/// distance divided by the drone's covariance value.
pub fn sed(drone: &DroneState, user_xy: Vec2, altitude: f64) -> f64 {
    assert!(drone.sigma > 0.0, "SED requires a positive sigma");
    channel::distance_3d(drone.mean, user_xy, altitude) / drone.sigma
}

/// Hard assignment: each user goes to the drone with the smallest SED, ties
/// broken by the lowest drone index.
pub fn assign_users(fleet: &[DroneState], users: &UserField, altitude: f64) -> Assignment {
    assert!(!fleet.is_empty(), "cannot assign users to an empty fleet");
    let serving = users
        .positions()
        .iter()
        .map(|&pos| {
            let mut best = 0usize;
            let mut best_sed = sed(&fleet[0], pos, altitude);
            for (j, drone) in fleet.iter().enumerate().skip(1) {
                let s = sed(drone, pos, altitude);
                if s < best_sed {
                    best = j;
                    best_sed = s;
                }
            }
            best
        })
        .collect();
    Assignment::new(fleet.len(), serving).expect("indices are in range by construction")
}

/// Gated covariance update: increases are rate-limited by `d_sigma_max`,
/// capped at `sigma_max`, and refused entirely while the drone is over
/// capacity; decreases always go through.
pub fn clamp_sigma_update(
    sigma_old: f64,
    sigma_new_raw: f64,
    cluster_size: usize,
    config: &DucemConfig,
) -> f64 {
    debug_assert!(sigma_old > 0.0);
    if sigma_new_raw <= sigma_old {
        return sigma_new_raw;
    }
    if cluster_size > config.u_max {
        return sigma_old;
    }
    sigma_new_raw
        .min(sigma_old + config.d_sigma_max)
        .min(config.sigma_max)
}

/// Move every drone with at least one served user to the centroid of its
/// users; drones with empty clusters keep their EM-updated mean.
pub fn recenter_drones(fleet: &mut [DroneState], w: &Assignment, users: &UserField) {
    for (j, drone) in fleet.iter_mut().enumerate() {
        let mut sum = Vec2::ZERO;
        let mut count = 0usize;
        for u in w.users_of(j) {
            sum = sum + users.position(u);
            count += 1;
        }
        if count > 0 {
            drone.mean = sum * (1.0 / count as f64);
        }
    }
}

/// Size each drone's transmit power for its farthest served user so that
/// every served user meets the SNR target; empty clusters transmit nothing.
pub fn compute_powers(
    fleet: &mut [DroneState],
    w: &Assignment,
    users: &UserField,
    params: &ChannelParams,
) {
    for (j, drone) in fleet.iter_mut().enumerate() {
        let mut power = 0.0f64;
        for u in w.users_of(j) {
            let d = channel::distance_3d(drone.mean, users.position(u), params.altitude);
            power = power.max(channel::required_power(d, params));
        }
        drone.power = power;
    }
}

/// Grow the fleet by one drone aimed at the most violating cluster (largest
/// user overflow, then largest power excess, then largest cluster). The new
/// drone spawns on that cluster's farthest member, jittered by up to 1 m, so
/// it carves off the periphery that drives the violation; spawning on the
/// cluster centroid instead duplicates the incumbent and the pair splits the
/// load poorly. Mixing proportions are renormalized.
pub fn add_drone(
    fleet: &mut Vec<DroneState>,
    users: &UserField,
    w: &Assignment,
    config: &DucemConfig,
    max_drones: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), DucemError> {
    if fleet.len() >= max_drones {
        return Err(DucemError::MaxDronesExceeded { max_drones });
    }
    let sizes = w.cluster_sizes();
    let target = (0..fleet.len())
        .filter(|&j| sizes[j] > 0)
        .max_by(|&a, &b| {
            let overflow = |j: usize| sizes[j] as isize - config.u_max as isize;
            let power_excess = |j: usize| fleet[j].power - config.p_max;
            (overflow(a), power_excess(a), sizes[a])
                .partial_cmp(&(overflow(b), power_excess(b), sizes[b]))
                .unwrap()
                // max_by keeps the later of equal elements; prefer the lower index.
                .then(std::cmp::Ordering::Greater)
        })
        .expect("some cluster is nonempty because users are nonempty");

    let anchor = fleet[target].mean;
    let spawn = w
        .users_of(target)
        .map(|u| users.position(u))
        .max_by(|a, b| {
            a.dist_sq(anchor)
                .partial_cmp(&b.dist_sq(anchor))
                .unwrap()
                .then(std::cmp::Ordering::Greater)
        })
        .expect("target cluster is nonempty");
    let angle = rng.random::<f64>() * std::f64::consts::TAU;
    let radius = rng.random::<f64>();
    let jitter = Vec2::new(radius * angle.cos(), radius * angle.sin());

    let m_new = fleet.len() as f64 + 1.0;
    for drone in fleet.iter_mut() {
        drone.mixing *= (m_new - 1.0) / m_new;
    }
    fleet.push(DroneState {
        mean: spawn + jitter,
        sigma: fleet[target].sigma.min(config.sigma_max),
        mixing: 1.0 / m_new,
        power: 0.0,
    });
    Ok(())
}

fn gmm_view(fleet: &[DroneState]) -> GmmParams {
    GmmParams {
        components: fleet
            .iter()
            .map(|d| GmmComponent {
                weight: d.mixing,
                mean: d.mean,
                cov: Cov2::isotropic(d.sigma),
            })
            .collect(),
    }
}

/// Modified M-step: standard weight/mean updates plus the isotropic
/// (half-trace) covariance estimate floored at h². Components with a
/// vanishing effective sample count keep their previous mean and sigma.
fn ducem_em_update(
    users: &UserField,
    resp: &em::Responsibilities,
    fleet: &[DroneState],
    min_sigma: f64,
) -> (Vec<f64>, Vec<Vec2>, Vec<f64>) {
    let n = users.len();
    let m = fleet.len();
    let mut weights = Vec::with_capacity(m);
    let mut means = Vec::with_capacity(m);
    let mut sigma_raw = Vec::with_capacity(m);
    for j in 0..m {
        let nj = resp.component_weight(j);
        weights.push(nj / n as f64);
        if nj < EMPTY_COMPONENT_TOL {
            means.push(fleet[j].mean);
            sigma_raw.push(fleet[j].sigma);
            continue;
        }
        let mut mean = Vec2::ZERO;
        for t in 0..n {
            mean = mean + users.position(t) * resp.get(j, t);
        }
        mean = mean * (1.0 / nj);
        let mut spread = 0.0;
        for t in 0..n {
            spread += resp.get(j, t) * users.position(t).dist_sq(mean);
        }
        means.push(mean);
        sigma_raw.push((spread / (2.0 * nj)).max(min_sigma));
    }
    (weights, means, sigma_raw)
}

fn feasible(sizes: &[usize], fleet: &[DroneState], config: &DucemConfig) -> bool {
    !fleet
        .iter()
        .zip(sizes)
        .any(|(d, &s)| s > config.u_max || d.power > config.p_max)
}

/// Run the full clustering loop and return the best feasible deployment by
/// energy efficiency.
pub fn run_ducem(
    users: &UserField,
    config: &DucemConfig,
    params: &ChannelParams,
) -> Result<SolutionRecord, DucemError> {
    run_ducem_with_diagnostics(users, config, params).map(|(record, _)| record)
}

/// Same as [`run_ducem`] but also reports run instrumentation.
pub fn run_ducem_with_diagnostics(
    users: &UserField,
    config: &DucemConfig,
    params: &ChannelParams,
) -> Result<(SolutionRecord, RunDiagnostics), DucemError> {
    config.validate()?;
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let max_drones = config.max_drones.min(users.len());

    let bbox = Rect::bounding(users.positions());
    let min_sigma = sigma_floor(params);
    // Start every drone at the floor. Reach then grows only through the
    // rate-limited, capacity-gated updates; seeding sigma at the data scale
    // instead lets early components hold order-of-magnitude SED advantages
    // that starve every drone added later.
    let sigma0 = min_sigma.min(config.sigma_max);
    let mut fleet = vec![DroneState {
        mean: bbox.sample(&mut rng),
        sigma: sigma0,
        mixing: 1.0,
        power: 0.0,
    }];

    let mut prev: Vec<(Vec2, f64)> = fleet.iter().map(|d| (d.mean, d.sigma)).collect();
    let mut max_dtheta = f64::INFINITY;
    let mut solution_found = false;
    let mut best: Option<SolutionRecord> = None;
    let mut last: Option<SolutionRecord> = None;
    let mut diag = RunDiagnostics {
        iterations: 0,
        final_drone_count: fleet.len(),
        drones_added: 0,
        max_sigma_step: 0.0,
        max_sigma_seen: sigma0,
        feasible_iterations: 0,
    };

    for iteration in 0..config.max_iterations {
        if max_dtheta <= config.eps1 && solution_found {
            break;
        }
        diag.iterations = iteration + 1;

        // Posterior probabilities and EM parameter updates.
        let resp = em::e_step(users, &gmm_view(&fleet))?;
        let (weights, means, sigma_raw) = ducem_em_update(users, &resp, &fleet, min_sigma);
        for (j, drone) in fleet.iter_mut().enumerate() {
            drone.mixing = weights[j];
            drone.mean = means[j];
        }

        // Hard assignment on the pre-update sigmas, then recenter and size power.
        let w = assign_users(&fleet, users, params.altitude);
        recenter_drones(&mut fleet, &w, users);
        compute_powers(&mut fleet, &w, users, params);

        // Gated covariance updates.
        let sizes = w.cluster_sizes();
        for (j, drone) in fleet.iter_mut().enumerate() {
            let updated = clamp_sigma_update(drone.sigma, sigma_raw[j], sizes[j], config);
            // The measured step may exceed the limit by one rounding of
            // sigma_old + d_sigma_max; allow that and nothing more.
            let step = updated - drone.sigma;
            debug_assert!(
                step <= config.d_sigma_max + SIGMA_STEP_SLACK,
                "sigma increase {step} exceeds the rate limit"
            );
            debug_assert!(updated <= config.sigma_max, "sigma {updated} exceeds the cap");
            diag.max_sigma_step = diag.max_sigma_step.max(step);
            drone.sigma = updated;
            diag.max_sigma_seen = diag.max_sigma_seen.max(drone.sigma);
        }

        // Grow the fleet once updates are nearly converged and the current
        // drone count cannot satisfy the constraints. The new drone shifts
        // the parameter set, so the change measure restarts from scratch.
        if max_dtheta < config.eps2 && !solution_found {
            if fleet.len() >= max_drones {
                break;
            }
            add_drone(&mut fleet, users, &w, config, max_drones, &mut rng)?;
            diag.drones_added += 1;
            diag.final_drone_count = fleet.len();
            prev = fleet.iter().map(|d| (d.mean, d.sigma)).collect();
            max_dtheta = f64::INFINITY;
            continue;
        }

        // Feasibility: a single over-capacity or over-power drone disqualifies
        // the iterate.
        solution_found = feasible(&sizes, &fleet, config);

        let ee = match channel::energy_efficiency(&w, &fleet, users, params) {
            Ok(ee) => ee,
            Err(ChannelError::ZeroTotalPower) => 0.0,
            Err(e) => return Err(e.into()),
        };
        if solution_found {
            diag.feasible_iterations += 1;
            if best.as_ref().is_none_or(|b| ee > b.ee_score) {
                best = Some(SolutionRecord {
                    fleet: fleet.clone(),
                    assignment: w.clone(),
                    ee_score: ee,
                    iteration_found: iteration,
                    feasible: true,
                });
            }
        } else {
            last = Some(SolutionRecord {
                fleet: fleet.clone(),
                assignment: w.clone(),
                ee_score: ee,
                iteration_found: iteration,
                feasible: false,
            });
        }

        // Largest parameter change across the fleet: mean shifts in meters,
        // sigma shifts in m², mixed deliberately.
        max_dtheta = fleet
            .iter()
            .zip(&prev)
            .map(|(d, &(pm, ps))| d.mean.dist(pm).max((d.sigma - ps).abs()))
            .fold(0.0, f64::max);
        prev = fleet.iter().map(|d| (d.mean, d.sigma)).collect();
    }

    diag.final_drone_count = fleet.len();
    match best {
        Some(record) => Ok((record, diag)),
        None => Err(DucemError::NoFeasibleSolution {
            iterations: diag.iterations,
            drones: fleet.len(),
            last: last.map(Box::new),
        }),
    }
}
