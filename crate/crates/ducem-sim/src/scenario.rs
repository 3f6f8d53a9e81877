//! Scenario construction and persistence.
//!
//! A scenario bundles the user snapshot with every config the solvers need,
//! in one self-describing JSON document. Field names carry explicit units;
//! decibel values live only here and are converted to linear quantities when
//! the channel parameters are materialized.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelError, ChannelParams, UserField};
use crate::ducem::DucemConfig;
use crate::geo::Rect;
use crate::kmeans::KmeansConfig;
use crate::mobility::TraceSnapshot;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("snapshot index {index} out of range, trace has {len} snapshots")]
    SnapshotOutOfRange { index: usize, len: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts / 1e-3).log10()
}

/// Channel configuration at the file boundary, in conventional units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub pathloss_exponent: f64,
    pub ref_gain_db: f64,
    pub noise_power_dbm: f64,
    pub bandwidth_per_user_hz: f64,
    pub altitude_m: f64,
    pub snr_target_db: f64,
    pub sinr_threshold_db: f64,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec {
            pathloss_exponent: 2.0,
            ref_gain_db: -30.0,
            noise_power_dbm: -100.0,
            bandwidth_per_user_hz: 1e7,
            altitude_m: 10.0,
            snr_target_db: 12.0,
            sinr_threshold_db: 0.0,
        }
    }
}

impl ChannelSpec {
    /// Convert to linear in-memory parameters.
    pub fn to_params(&self) -> Result<ChannelParams, ChannelError> {
        ChannelParams::new(
            self.pathloss_exponent,
            db_to_linear(self.ref_gain_db),
            dbm_to_watts(self.noise_power_dbm),
            self.bandwidth_per_user_hz,
            self.altitude_m,
            db_to_linear(self.snr_target_db),
            db_to_linear(self.sinr_threshold_db),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetadata {
    pub name: String,
    /// Seed used to generate the user snapshot.
    pub seed: u64,
    /// Free-form record of how the snapshot was produced.
    pub description: String,
}

/// A reproducible experiment input: users plus every solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub metadata: ScenarioMetadata,
    pub users: UserField,
    pub channel: ChannelSpec,
    pub ducem: DucemConfig,
    pub kmeans: KmeansConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.channel.to_params().map_err(ScenarioError::Channel)?;
        self.ducem
            .validate()
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        self.kmeans
            .validate()
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serialization");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(json)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn store(&self, path: &Path) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_json()).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// Scenario whose users are one snapshot of a mobility trace.
pub fn from_trace(
    trace: &[TraceSnapshot],
    snapshot_index: usize,
    metadata: ScenarioMetadata,
    channel: ChannelSpec,
    ducem: DucemConfig,
    kmeans: KmeansConfig,
) -> Result<Scenario, ScenarioError> {
    let snapshot = trace
        .get(snapshot_index)
        .ok_or(ScenarioError::SnapshotOutOfRange {
            index: snapshot_index,
            len: trace.len(),
        })?;
    let scenario = Scenario {
        metadata,
        users: snapshot.to_user_field()?,
        channel,
        ducem,
        kmeans,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Scenario with users drawn i.i.d. uniform over `area`.
pub fn static_uniform(
    n_users: usize,
    area: Rect,
    seed: u64,
    name: &str,
    channel: ChannelSpec,
    ducem: DucemConfig,
    kmeans: KmeansConfig,
) -> Result<Scenario, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = (0..n_users).map(|_| area.sample(&mut rng)).collect();
    let scenario = Scenario {
        metadata: ScenarioMetadata {
            name: name.to_string(),
            seed,
            description: format!(
                "uniform: {n_users} users over [{}, {}] x [{}, {}]",
                area.min.x, area.max.x, area.min.y, area.max.y
            ),
        },
        users: UserField::new(positions)?,
        channel,
        ducem,
        kmeans,
    };
    scenario.validate()?;
    Ok(scenario)
}
