//! Trace-driven simulator for switching small cells off in a two-tier
//! cellular network.
//!
//! A macro cell (index 0) overlaps `s` small cells. Each traffic slot, a
//! switching method decides which small cells sleep; their demand is handed
//! to the macro cell. Methods are compared on energy use and on whether the
//! macro cell stays within capacity.
//!
//! The learning method is SARSA with a linear value estimate ([`agent`]). The
//! fixed references live in [`benchmarks`].

pub mod agent;
pub mod benchmarks;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod network;
pub mod power_model;
pub mod scenario;
pub mod simulation;
pub mod traffic;

pub use agent::{Agent, AgentConfig, WeightVectors};
pub use error::{Error, Result};
pub use experiment::{run, sweep, RunConfig};
pub use network::{NetworkState, SlotDemand};
pub use power_model::{BaseStation, BsType, PowerProfile};
pub use scenario::Scenario;
pub use simulation::Method;
pub use traffic::TrafficTrace;
