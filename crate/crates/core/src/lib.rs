//! Base station clustering for interference networks.
//!
//! This crate holds the allocation-only algorithmic core: special functions,
//! random network drops, coalition structures (set partitions), the long-term
//! throughput model with CSI acquisition overhead, the coalition formation
//! game and the benchmark clustering methods. It has no IO and builds without
//! `std`; the `bsclust` crate carries the experiment harness, file formats
//! and CLI on top of it.
//!
//! User indices are zero-based throughout the API. The text form of a
//! [`CoalitionStructure`] is one-based (`{1,3}|{2}`) to match how clusters
//! are usually written down.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod baselines;
mod error;
pub mod formation;
pub mod network;
pub mod partitions;
pub mod rate_model;
pub mod rng;
pub mod specfun;

pub use baselines::MethodId;
pub use error::{Error, Result};
pub use formation::{FormationConfig, FormationOutcome, FormationTrace, PlayerState};
pub use network::{Antennas, CoherenceBlock, Network, ScenarioConfig};
pub use partitions::{Coalition, CoalitionStructure};
pub use rate_model::{RateContext, ThroughputReport};
pub use rng::SeedStream;
