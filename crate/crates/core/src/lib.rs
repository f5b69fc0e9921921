//! Uplink/downlink antenna splitting for full-duplex multi-antenna base stations.
//!
//! Each base-station antenna is assigned either to receive uplink traffic or to
//! transmit downlink traffic. The assignment that minimises the sum MSE of all
//! users is searched by a relaxation solver ([`solver::rlx_prox`]) and compared
//! against exhaustive search and a fixed half split ([`baselines`]).

pub mod baselines;
pub mod channel;
pub mod config;
pub mod decomposition;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod mse;
pub mod rng;
pub mod solver;

#[cfg(test)]
mod testutil;

pub use channel::ChannelRealization;
pub use config::SystemConfig;
pub use error::{Error, Result};
pub use mse::{AntennaAssignment, MseReport, ReceiveFilters};
