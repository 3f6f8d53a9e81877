//! Constrained k-means baseline: k-means++ seeding, Lloyd iterations, and
//! recursive splitting of clusters that violate the per-drone user or power
//! limits, with the best restart selected by energy efficiency.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{
    self, Assignment, ChannelError, ChannelParams, DroneState, UserField,
};
use crate::ducem::SolutionRecord;
use crate::geo::Vec2;

#[derive(Debug, Error)]
pub enum KmeansError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("k = {k} exceeds the number of users {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("split recursion exceeded depth {depth}; cluster cannot be partitioned further")]
    SplitDepthExceeded { depth: usize },
    #[error("no restart produced a feasible solution ({restarts} attempted)")]
    NoFeasibleSolution { restarts: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Initial cluster count per restart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StartK {
    /// ⌈U / U_max⌉ — the smallest count that can possibly satisfy the user
    /// cap; splitting grows it from there.
    Pigeonhole,
    /// Fixed initial count (1 reproduces the start-with-one-drone variant).
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmeansConfig {
    /// Independent seeded restarts; the best energy efficiency wins.
    pub restarts: usize,
    pub u_max: usize,
    pub p_max: f64,
    pub rng_seed: u64,
    /// Safety bound for the recursive splitting of violating clusters.
    pub max_split_depth: usize,
    pub start_k: StartK,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        KmeansConfig {
            restarts: 10,
            u_max: 100,
            p_max: 1.0,
            rng_seed: 0,
            max_split_depth: 32,
            start_k: StartK::Pigeonhole,
        }
    }
}

impl KmeansConfig {
    pub fn validate(&self) -> Result<(), KmeansError> {
        if self.restarts < 1 {
            return Err(KmeansError::InvalidConfig("restarts must be >= 1".into()));
        }
        if self.u_max < 1 {
            return Err(KmeansError::InvalidConfig("u_max must be >= 1".into()));
        }
        if !(self.p_max.is_finite() && self.p_max > 0.0) {
            return Err(KmeansError::InvalidConfig(format!(
                "p_max must be finite and > 0, got {}",
                self.p_max
            )));
        }
        if self.max_split_depth == 0 {
            return Err(KmeansError::InvalidConfig(
                "max_split_depth must be >= 1".into(),
            ));
        }
        if let StartK::Fixed(k) = self.start_k {
            if k == 0 {
                return Err(KmeansError::InvalidConfig("start_k must be >= 1".into()));
            }
        }
        Ok(())
    }
}

/// Per-restart scores of a baseline run; `None` marks a failed restart.
#[derive(Debug, Clone, PartialEq)]
pub struct KmeansDiagnostics {
    pub restart_scores: Vec<Option<f64>>,
}

/// k-means++ seeding over the full user set.
///
/// The first center is uniform over the users; each later center is drawn
/// with probability proportional to the squared distance to its nearest
/// already-chosen center, via a cumulative scan over one uniform draw.
pub fn kmeanspp_init(
    users: &UserField,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec2>, KmeansError> {
    if k == 0 || k > users.len() {
        return Err(KmeansError::KTooLarge { k, n: users.len() });
    }
    let indices: Vec<usize> = (0..users.len()).collect();
    Ok(kmeanspp_init_subset(users, &indices, k, rng))
}

fn kmeanspp_init_subset(
    users: &UserField,
    members: &[usize],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec2> {
    debug_assert!(k >= 1 && k <= members.len());
    let mut centers = Vec::with_capacity(k);
    let first = members[rng.random_range(0..members.len())];
    centers.push(users.position(first));

    let mut d2 = vec![0.0f64; members.len()];
    while centers.len() < k {
        let mut total = 0.0;
        for (slot, &u) in members.iter().enumerate() {
            let pos = users.position(u);
            let mut best = f64::INFINITY;
            for c in &centers {
                best = best.min(c.dist_sq(pos));
            }
            d2[slot] = best;
            total += best;
        }
        let pick = if total > 0.0 {
            // Cumulative scan over the D² weights.
            let threshold = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = members.len() - 1;
            for (slot, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > threshold {
                    chosen = slot;
                    break;
                }
            }
            chosen
        } else {
            // All candidates coincide with a chosen center.
            rng.random_range(0..members.len())
        };
        centers.push(users.position(members[pick]));
    }
    centers
}

/// Standard Lloyd iterations to a fixed point over the full user set,
/// seeded by k-means++. Assignment uses plain 2-D ground distance; ties go
/// to the lowest center index.
pub fn lloyd_cluster(
    users: &UserField,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Vec2>, Assignment), KmeansError> {
    if k == 0 || k > users.len() {
        return Err(KmeansError::KTooLarge { k, n: users.len() });
    }
    let indices: Vec<usize> = (0..users.len()).collect();
    let (centers, clusters) = lloyd_subset(users, &indices, k, rng);
    let mut serving = vec![0usize; users.len()];
    for (j, cluster) in clusters.iter().enumerate() {
        for &u in cluster {
            serving[u] = j;
        }
    }
    let assignment = Assignment::new(k, serving)?;
    Ok((centers, assignment))
}

const LLOYD_MAX_ITERS: usize = 1000;

fn nearest_center(centers: &[Vec2], pos: Vec2) -> usize {
    let mut best = 0usize;
    let mut best_d = centers[0].dist_sq(pos);
    for (j, c) in centers.iter().enumerate().skip(1) {
        let d = c.dist_sq(pos);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

/// Lloyd over an index subset; returns centers plus clusters of global user
/// indices. Empty clusters re-seed at the point farthest from its nearest
/// center.
fn lloyd_subset(
    users: &UserField,
    members: &[usize],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec2>, Vec<Vec<usize>>) {
    let mut centers = kmeanspp_init_subset(users, members, k, rng);
    let mut labels = vec![usize::MAX; members.len()];
    for _ in 0..LLOYD_MAX_ITERS {
        let mut changed = false;
        for (slot, &u) in members.iter().enumerate() {
            let j = nearest_center(&centers, users.position(u));
            if labels[slot] != j {
                labels[slot] = j;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        // Centroid update, with the farthest-point rule for empty clusters.
        let mut sums = vec![Vec2::ZERO; k];
        let mut counts = vec![0usize; k];
        for (slot, &u) in members.iter().enumerate() {
            sums[labels[slot]] = sums[labels[slot]] + users.position(u);
            counts[labels[slot]] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = sums[j] * (1.0 / counts[j] as f64);
            } else {
                let far = members
                    .iter()
                    .max_by(|&&a, &&b| {
                        let da = centers[nearest_center(&centers, users.position(a))]
                            .dist_sq(users.position(a));
                        let db = centers[nearest_center(&centers, users.position(b))]
                            .dist_sq(users.position(b));
                        da.partial_cmp(&db).unwrap()
                    })
                    .copied()
                    .expect("members nonempty");
                centers[j] = users.position(far);
            }
        }
    }
    let mut clusters = vec![Vec::new(); k];
    for (slot, &u) in members.iter().enumerate() {
        clusters[labels[slot]].push(u);
    }
    (centers, clusters)
}

fn cluster_centroid(users: &UserField, members: &[usize]) -> Vec2 {
    let mut sum = Vec2::ZERO;
    for &u in members {
        sum = sum + users.position(u);
    }
    sum * (1.0 / members.len() as f64)
}

/// Power a drone parked at the cluster centroid needs to reach its farthest
/// member at the SNR target.
fn cluster_power(users: &UserField, members: &[usize], params: &ChannelParams) -> f64 {
    let center = cluster_centroid(users, members);
    members
        .iter()
        .map(|&u| {
            channel::required_power(
                channel::distance_3d(center, users.position(u), params.altitude),
                params,
            )
        })
        .fold(0.0, f64::max)
}

fn violates(
    users: &UserField,
    members: &[usize],
    config: &KmeansConfig,
    params: &ChannelParams,
) -> bool {
    members.len() > config.u_max || cluster_power(users, members, params) > config.p_max
}

/// Split a constraint-violating cluster in two with Lloyd, re-checking each
/// half and recursing until every piece complies or the depth bound trips.
pub fn split_violating_cluster(
    users: &UserField,
    members: &[usize],
    config: &KmeansConfig,
    params: &ChannelParams,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> Result<Vec<Vec<usize>>, KmeansError> {
    debug_assert!(violates(users, members, config, params));
    if depth >= config.max_split_depth {
        return Err(KmeansError::SplitDepthExceeded { depth });
    }
    if members.len() < 2 {
        // A lone violating user cannot be split any further.
        return Err(KmeansError::SplitDepthExceeded { depth });
    }
    let (_, halves) = lloyd_subset(users, members, 2, rng);
    let mut out = Vec::new();
    for half in halves {
        if half.is_empty() {
            continue;
        }
        if half.len() == members.len() {
            // Lloyd failed to separate (coincident points); recursing would
            // never terminate.
            return Err(KmeansError::SplitDepthExceeded { depth });
        }
        if violates(users, &half, config, params) {
            out.extend(split_violating_cluster(
                users,
                &half,
                config,
                params,
                rng,
                depth + 1,
            )?);
        } else {
            out.push(half);
        }
    }
    Ok(out)
}

/// Run the constrained baseline over all restarts and return the best-EE
/// feasible deployment.
pub fn run_kmeans_baseline(
    users: &UserField,
    config: &KmeansConfig,
    params: &ChannelParams,
) -> Result<SolutionRecord, KmeansError> {
    run_kmeans_with_diagnostics(users, config, params).map(|(record, _)| record)
}

/// Same as [`run_kmeans_baseline`] but also reports per-restart scores.
pub fn run_kmeans_with_diagnostics(
    users: &UserField,
    config: &KmeansConfig,
    params: &ChannelParams,
) -> Result<(SolutionRecord, KmeansDiagnostics), KmeansError> {
    config.validate()?;
    params.validate()?;
    let mut seed_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let sub_seeds: Vec<u64> = (0..config.restarts).map(|_| seed_rng.random()).collect();

    let start_k = match config.start_k {
        StartK::Pigeonhole => users.len().div_ceil(config.u_max),
        StartK::Fixed(k) => k,
    }
    .clamp(1, users.len());

    let mut best: Option<SolutionRecord> = None;
    let mut restart_scores = Vec::with_capacity(config.restarts);
    for (restart, &seed) in sub_seeds.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match run_single_restart(users, config, params, start_k, restart, &mut rng) {
            Ok(record) => {
                restart_scores.push(Some(record.ee_score));
                if best.as_ref().is_none_or(|b| record.ee_score > b.ee_score) {
                    best = Some(record);
                }
            }
            Err(KmeansError::SplitDepthExceeded { .. }) => restart_scores.push(None),
            Err(e) => return Err(e),
        }
    }

    let diagnostics = KmeansDiagnostics { restart_scores };
    match best {
        Some(record) => Ok((record, diagnostics)),
        None => Err(KmeansError::NoFeasibleSolution {
            restarts: config.restarts,
        }),
    }
}

fn run_single_restart(
    users: &UserField,
    config: &KmeansConfig,
    params: &ChannelParams,
    start_k: usize,
    restart: usize,
    rng: &mut ChaCha8Rng,
) -> Result<SolutionRecord, KmeansError> {
    let indices: Vec<usize> = (0..users.len()).collect();
    let (_, initial) = lloyd_subset(users, &indices, start_k, rng);

    let mut final_clusters: Vec<Vec<usize>> = Vec::new();
    for cluster in initial {
        if cluster.is_empty() {
            continue;
        }
        if violates(users, &cluster, config, params) {
            final_clusters.extend(split_violating_cluster(
                users, &cluster, config, params, rng, 0,
            )?);
        } else {
            final_clusters.push(cluster);
        }
    }

    // Equal covariance across components; mixing reflects cluster share.
    let n = users.len() as f64;
    let mut fleet = Vec::with_capacity(final_clusters.len());
    let mut serving = vec![0usize; users.len()];
    for (j, cluster) in final_clusters.iter().enumerate() {
        let center = cluster_centroid(users, cluster);
        fleet.push(DroneState {
            mean: center,
            sigma: 1.0,
            mixing: cluster.len() as f64 / n,
            power: 0.0,
        });
        for &u in cluster {
            serving[u] = j;
        }
    }
    let assignment = Assignment::new(fleet.len(), serving)?;
    crate::ducem::compute_powers(&mut fleet, &assignment, users, params);

    let sizes = assignment.cluster_sizes();
    let feasible = fleet
        .iter()
        .zip(&sizes)
        .all(|(d, &s)| s <= config.u_max && d.power <= config.p_max);
    if !feasible {
        // Splitting guarantees compliance; reaching this means the split
        // bound was loose. Treat like a failed restart.
        return Err(KmeansError::SplitDepthExceeded {
            depth: config.max_split_depth,
        });
    }

    let ee = channel::energy_efficiency(&assignment, &fleet, users, params)?;
    Ok(SolutionRecord {
        fleet,
        assignment,
        ee_score: ee,
        iteration_found: restart,
        feasible: true,
    })
}
