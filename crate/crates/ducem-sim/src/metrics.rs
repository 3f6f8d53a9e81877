//! Single scoring path shared by both solvers and the experiment harness, so
//! every consumer computes rate, power, energy efficiency, and link
//! reliability identically.

use serde::{Deserialize, Serialize};

use crate::channel::{
    self, Assignment, ChannelError, ChannelParams, DroneState, UserField,
};

/// Link reliability at one SINR threshold (linear ratio).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReliability {
    pub sinr_threshold: f64,
    pub l_rel: f64,
}

/// Full score of one deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub total_rate_bps: f64,
    pub total_power_w: f64,
    pub ee_bits_per_joule: f64,
    pub sinr_per_user: Vec<f64>,
    pub link_reliability: Vec<ThresholdReliability>,
}

/// Score a deployment against any number of reliability thresholds
/// (linear ratios). Delegates every quantity to [`crate::channel`].
pub fn score(
    fleet: &[DroneState],
    w: &Assignment,
    users: &UserField,
    params: &ChannelParams,
    thresholds: &[f64],
) -> Result<ScoreReport, ChannelError> {
    let total_rate_bps = channel::total_rate(w, fleet, users, params);
    let total_power_w = channel::total_power(fleet);
    let ee_bits_per_joule = channel::energy_efficiency(w, fleet, users, params)?;
    debug_assert!(
        (ee_bits_per_joule * total_power_w - total_rate_bps).abs()
            <= 1e-9 * total_rate_bps.max(1.0),
        "ee * power must reproduce the rate"
    );
    let sinr_per_user: Vec<f64> = (0..w.num_users())
        .map(|u| channel::sinr(u, w.serving(u), fleet, users, params))
        .collect();
    let link_reliability = thresholds
        .iter()
        .map(|&threshold| ThresholdReliability {
            sinr_threshold: threshold,
            l_rel: sinr_per_user.iter().filter(|&&s| s >= threshold).count() as f64
                / sinr_per_user.len() as f64,
        })
        .collect();
    Ok(ScoreReport {
        total_rate_bps,
        total_power_w,
        ee_bits_per_joule,
        sinr_per_user,
        link_reliability,
    })
}

/// Independent replay of the deployment constraints: per-user SNR target,
/// per-drone user cap, per-drone power cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub snr_violations: usize,
    pub oversized_clusters: usize,
    pub overpowered_drones: usize,
}

impl ConstraintReport {
    pub fn all_ok(&self) -> bool {
        self.snr_violations == 0 && self.oversized_clusters == 0 && self.overpowered_drones == 0
    }
}

/// Relative slack for the SNR replay: powers are sized so the farthest user
/// sits exactly on the target, so the comparison needs an epsilon.
pub const SNR_REPLAY_TOLERANCE: f64 = 1e-9;

pub fn check_constraints(
    fleet: &[DroneState],
    w: &Assignment,
    users: &UserField,
    params: &ChannelParams,
    u_max: usize,
    p_max: f64,
) -> ConstraintReport {
    let mut snr_violations = 0;
    for u in 0..w.num_users() {
        let drone = &fleet[w.serving(u)];
        let d = channel::distance_3d(drone.mean, users.position(u), params.altitude);
        let got = channel::snr(drone.power, channel::channel_gain(d, params), params);
        if got < params.snr_target * (1.0 - SNR_REPLAY_TOLERANCE) {
            snr_violations += 1;
        }
    }
    let sizes = w.cluster_sizes();
    ConstraintReport {
        snr_violations,
        oversized_clusters: sizes.iter().filter(|&&s| s > u_max).count(),
        overpowered_drones: fleet.iter().filter(|d| d.power > p_max).count(),
    }
}
