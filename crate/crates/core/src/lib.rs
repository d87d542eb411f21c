//! Deterministic multi-agent simulation of an autonomous baggage-conveyor
//! (AIV) fleet: a circulation graph with two charging stations, an
//! auction-based task supervisor, and eight allocation strategies ranging
//! from crisp baselines to Mamdani-fuzzy cost, recharge, station, charge-rate
//! and speed decisions.

pub mod allocation;
pub mod fuzzy;
pub mod models;
pub mod sim;
pub mod vehicle;
pub mod world;

pub use allocation::{Scenario, Strategy, Thresholds};
pub use sim::{compute_metrics, run, EventLog, Metrics, RunOutput, SimConfig};
