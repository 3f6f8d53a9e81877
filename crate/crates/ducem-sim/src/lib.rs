//! Deterministic simulator for energy-efficient drone small cell placement.
//!
//! Ground users are clustered and served by drone base stations whose
//! positions, coverage reach, and transmit powers come out of a modified
//! Gaussian-mixture EM loop ([`ducem`]); a capacity-constrained k-means
//! baseline ([`kmeans`]) provides the comparison point. User snapshots come
//! from group mobility traces ([`mobility`]) or static distributions
//! ([`scenario`]), and the experiment harness ([`harness`]) sweeps the
//! per-drone user cap and reliability threshold to score both approaches on
//! energy efficiency and link reliability.

pub mod channel;
pub mod ducem;
pub mod em;
pub mod geo;
pub mod harness;
pub mod kmeans;
pub mod metrics;
pub mod mobility;
pub mod scenario;

pub use channel::{Assignment, ChannelParams, DroneState, UserField};
pub use ducem::{run_ducem, DucemConfig, SolutionRecord};
pub use geo::{Rect, Vec2};
pub use kmeans::{run_kmeans_baseline, KmeansConfig};
pub use mobility::MobilityConfig;
pub use scenario::Scenario;
