//! Free-space channel model for drone small cells: geometry, path loss,
//! SNR/SINR, Shannon rate, transmit power, energy efficiency, and link
//! reliability.
//!
//! All quantities are linear (watts and ratios). Decibels are converted at
//! the configuration boundary only, see [`crate::scenario`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::Vec2;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("invalid channel parameter: {0}")]
    InvalidParams(String),
    #[error("user field must be nonempty")]
    EmptyUserField,
    #[error("non-finite coordinate for user {index}")]
    NonFiniteCoordinate { index: usize },
    #[error("group id list length {groups} does not match user count {users}")]
    GroupLengthMismatch { groups: usize, users: usize },
    #[error("assignment references drone {drone} but fleet has {fleet} drones")]
    DroneIndexOutOfRange { drone: usize, fleet: usize },
    #[error("total transmit power is zero while total rate is nonzero")]
    ZeroTotalPower,
}

/// Channel and link-budget parameters. Everything is linear; use
/// [`crate::scenario::ChannelSpec`] to build one from dB-valued config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    /// Path loss exponent λ (dimensionless).
    pub pathloss_exponent: f64,
    /// Channel power gain α₀ at the reference distance d₀ = 1 m (linear ratio).
    pub ref_gain: f64,
    /// Receiver AWGN power σ₀² (watts).
    pub noise_power: f64,
    /// Bandwidth allocated per user channel B (Hz).
    pub bandwidth_per_user: f64,
    /// Common drone altitude h (meters).
    pub altitude: f64,
    /// Guaranteed per-user SNR target (linear ratio).
    pub snr_target: f64,
    /// SINR threshold above which a link counts as reliable (linear ratio).
    pub sinr_threshold: f64,
}

impl ChannelParams {
    pub fn new(
        pathloss_exponent: f64,
        ref_gain: f64,
        noise_power: f64,
        bandwidth_per_user: f64,
        altitude: f64,
        snr_target: f64,
        sinr_threshold: f64,
    ) -> Result<Self, ChannelError> {
        let p = ChannelParams {
            pathloss_exponent,
            ref_gain,
            noise_power,
            bandwidth_per_user,
            altitude,
            snr_target,
            sinr_threshold,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let checks = [
            (self.pathloss_exponent, "pathloss_exponent"),
            (self.ref_gain, "ref_gain"),
            (self.noise_power, "noise_power"),
            (self.bandwidth_per_user, "bandwidth_per_user"),
            (self.altitude, "altitude"),
            (self.snr_target, "snr_target"),
            (self.sinr_threshold, "sinr_threshold"),
        ];
        for (v, name) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(ChannelError::InvalidParams(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for ChannelParams {
    /// h = 10 m, λ = 2, σ₀² = 1e-13 W (-100 dBm), α₀ = 1e-3 (-30 dB),
    /// B = 10 MHz, SNR target = 10^1.2 (12 dB), reliability threshold 0 dB.
    fn default() -> Self {
        ChannelParams {
            pathloss_exponent: 2.0,
            ref_gain: 1e-3,
            noise_power: 1e-13,
            bandwidth_per_user: 1e7,
            altitude: 10.0,
            snr_target: 10f64.powf(1.2),
            sinr_threshold: 1.0,
        }
    }
}

/// Ground user positions at one time instant; the sample set for clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserField {
    positions: Vec<Vec2>,
    group_ids: Vec<u32>,
}

impl UserField {
    /// Users without group structure (all group 0).
    pub fn new(positions: Vec<Vec2>) -> Result<Self, ChannelError> {
        let n = positions.len();
        Self::with_groups(positions, vec![0; n])
    }

    pub fn with_groups(positions: Vec<Vec2>, group_ids: Vec<u32>) -> Result<Self, ChannelError> {
        if positions.is_empty() {
            return Err(ChannelError::EmptyUserField);
        }
        if let Some(index) = positions.iter().position(|p| !p.is_finite()) {
            return Err(ChannelError::NonFiniteCoordinate { index });
        }
        if group_ids.len() != positions.len() {
            return Err(ChannelError::GroupLengthMismatch {
                groups: group_ids.len(),
                users: positions.len(),
            });
        }
        Ok(UserField {
            positions,
            group_ids,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn position(&self, u: usize) -> Vec2 {
        self.positions[u]
    }

    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn group_id(&self, u: usize) -> u32 {
        self.group_ids[u]
    }

    pub fn group_ids(&self) -> &[u32] {
        &self.group_ids
    }
}

/// One drone small cell: mixture component plus transmit power.
///
/// `sigma` is the common diagonal value of the component's covariance (m²)
/// and doubles as the cluster-reach variable in SED assignment; `mixing` is
/// the component weight P(j); `power` is the transmit power in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DroneState {
    pub mean: Vec2,
    pub sigma: f64,
    pub mixing: f64,
    pub power: f64,
}

impl DroneState {
    pub fn new(mean: Vec2, sigma: f64, mixing: f64, power: f64) -> Self {
        debug_assert!(sigma > 0.0, "sigma must be positive");
        debug_assert!((0.0..=1.0).contains(&mixing), "mixing must be in [0,1]");
        debug_assert!(power >= 0.0, "power must be nonnegative");
        DroneState {
            mean,
            sigma,
            mixing,
            power,
        }
    }
}

/// User-to-drone association matrix W (M drones × U users).
///
/// Stored as the serving drone index per user, which makes "each column sums
/// to exactly 1" hold by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    num_drones: usize,
    serving: Vec<usize>,
}

impl Assignment {
    pub fn new(num_drones: usize, serving: Vec<usize>) -> Result<Self, ChannelError> {
        if let Some(&bad) = serving.iter().find(|&&j| j >= num_drones) {
            return Err(ChannelError::DroneIndexOutOfRange {
                drone: bad,
                fleet: num_drones,
            });
        }
        Ok(Assignment {
            num_drones,
            serving,
        })
    }

    pub fn num_drones(&self) -> usize {
        self.num_drones
    }

    pub fn num_users(&self) -> usize {
        self.serving.len()
    }

    /// Index of the drone serving user `u`.
    pub fn serving(&self, u: usize) -> usize {
        self.serving[u]
    }

    /// W(j, u).
    pub fn entry(&self, j: usize, u: usize) -> bool {
        self.serving[u] == j
    }

    /// Users served by drone `j`, in ascending user order.
    pub fn users_of(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.serving
            .iter()
            .enumerate()
            .filter_map(move |(u, &s)| (s == j).then_some(u))
    }

    /// U_j for every drone.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_drones];
        for &j in &self.serving {
            sizes[j] += 1;
        }
        sizes
    }
}

/// 3-D distance between a drone flying at `altitude` above `drone_xy` and a
/// ground user at `user_xy`. Always ≥ altitude.
pub fn distance_3d(drone_xy: Vec2, user_xy: Vec2, altitude: f64) -> f64 {
    (drone_xy.dist_sq(user_xy) + altitude * altitude).sqrt()
}

/// Free-space channel gain α₀ · d^(−λ).
///
/// Panics on d ≤ 0; the geometry keeps d ≥ altitude > 0.
pub fn channel_gain(d: f64, params: &ChannelParams) -> f64 {
    assert!(d > 0.0, "channel gain requires a positive distance, got {d}");
    params.ref_gain * d.powf(-params.pathloss_exponent)
}

/// Received SNR for transmit power `power_w` over a link with gain `gain`.
pub fn snr(power_w: f64, gain: f64, params: &ChannelParams) -> f64 {
    power_w * gain / params.noise_power
}

/// Transmit power that meets the SNR target exactly at distance `d`:
/// SNR_T · σ₀² · d^λ / α₀. Feeding the result back through [`snr`] recovers
/// the target.
pub fn required_power(d: f64, params: &ChannelParams) -> f64 {
    assert!(d > 0.0, "required power needs a positive distance, got {d}");
    params.snr_target * params.noise_power * d.powf(params.pathloss_exponent) / params.ref_gain
}

/// SINR of `user` when served by `fleet[serving]`, with every other drone
/// transmitting at full power on the same spectrum.
pub fn sinr(
    user: usize,
    serving: usize,
    fleet: &[DroneState],
    users: &UserField,
    params: &ChannelParams,
) -> f64 {
    let pos = users.position(user);
    let mut interference = 0.0;
    let mut signal = 0.0;
    for (i, drone) in fleet.iter().enumerate() {
        let gain = channel_gain(distance_3d(drone.mean, pos, params.altitude), params);
        let received = drone.power * gain;
        if i == serving {
            signal = received;
        } else {
            interference += received;
        }
    }
    signal / (params.noise_power + interference)
}

/// Shannon rate of a single link, bits/second. Uses log1p so tiny SINRs under
/// heavy interference do not lose precision.
fn link_rate(gamma: f64, params: &ChannelParams) -> f64 {
    params.bandwidth_per_user * gamma.ln_1p() / std::f64::consts::LN_2
}

/// Total downlink rate Σ_j Σ_u W(j,u) · B · log₂(1 + Γ_{u,j}), bits/second.
pub fn total_rate(
    w: &Assignment,
    fleet: &[DroneState],
    users: &UserField,
    params: &ChannelParams,
) -> f64 {
    (0..w.num_users())
        .map(|u| link_rate(sinr(u, w.serving(u), fleet, users, params), params))
        .sum()
}

/// Total transmit power Σ_j P_Tj, watts.
pub fn total_power(fleet: &[DroneState]) -> f64 {
    fleet.iter().map(|d| d.power).sum()
}

/// System energy efficiency: total rate over total power, bits/joule.
///
/// A system that transmits nothing (zero rate, zero power) scores 0; zero
/// power with nonzero rate is degenerate and rejected.
pub fn energy_efficiency(
    w: &Assignment,
    fleet: &[DroneState],
    users: &UserField,
    params: &ChannelParams,
) -> Result<f64, ChannelError> {
    let rate = total_rate(w, fleet, users, params);
    let power = total_power(fleet);
    if power <= 0.0 {
        if rate == 0.0 {
            return Ok(0.0);
        }
        return Err(ChannelError::ZeroTotalPower);
    }
    Ok(rate / power)
}

/// Fraction of served links whose SINR meets `threshold` (linear ratio).
pub fn link_reliability(
    w: &Assignment,
    fleet: &[DroneState],
    users: &UserField,
    params: &ChannelParams,
    threshold: f64,
) -> f64 {
    let reliable = (0..w.num_users())
        .filter(|&u| sinr(u, w.serving(u), fleet, users, params) >= threshold)
        .count();
    reliable as f64 / w.num_users() as f64
}
