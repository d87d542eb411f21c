//! Run configuration: scenario, fleet, time base, arrival process, graph and
//! model files, battery and policy constants.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::allocation::{Scenario, Thresholds};
use crate::models::ModelFiles;
use crate::vehicle::BatteryModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrivalSpec {
    /// One bag every `period_s`, the first at t = 0.
    FixedInterval { period_s: f64 },
    /// Poisson arrivals with a piecewise-constant rate; segments must be
    /// time-ordered and rates strictly positive.
    PiecewisePoisson { segments: Vec<RateSegment> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSegment {
    pub start_s: f64,
    pub rate_per_s: f64,
}

impl Default for ArrivalSpec {
    fn default() -> Self {
        ArrivalSpec::FixedInterval { period_s: 16.5 }
    }
}

/// How arriving bags pick their exit treadmill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitChoice {
    #[default]
    RoundRobin,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub seed: u64,
    pub scenario: Scenario,
    pub n_bags: u32,
    pub n_aivs: u32,
    /// Engine tick, seconds.
    pub dt_s: f64,
    pub arrivals: ArrivalSpec,
    pub exit_choice: ExitChoice,
    /// Circulation-graph file; `None` loads the shipped default plan.
    pub graph_file: Option<PathBuf>,
    pub model_files: ModelFiles,
    pub battery: BatteryModel,
    pub nominal_speed_mps: f64,
    pub thresholds: Thresholds,
    /// Hard stop for non-terminating configurations, seconds.
    pub wall_limit_s: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            scenario: Scenario::Sc3,
            n_bags: 100,
            n_aivs: 5,
            dt_s: 0.1,
            arrivals: ArrivalSpec::default(),
            exit_choice: ExitChoice::default(),
            graph_file: None,
            model_files: ModelFiles::default(),
            battery: BatteryModel::default(),
            nominal_speed_mps: 1.0,
            thresholds: Thresholds::default(),
            wall_limit_s: None,
        }
    }
}

impl SimConfig {
    /// Structural checks that do not need the graph or models.
    pub fn validate(&self) -> Result<(), String> {
        if self.dt_s <= 0.0 || !self.dt_s.is_finite() {
            return Err(format!("dt_s must be positive, got {}", self.dt_s));
        }
        if self.n_aivs == 0 {
            return Err("n_aivs must be at least 1".into());
        }
        if self.nominal_speed_mps <= 0.0 {
            return Err(format!(
                "nominal_speed_mps must be positive, got {}",
                self.nominal_speed_mps
            ));
        }
        if self.battery.charge_rate_per_s <= 0.0 {
            return Err("battery.charge_rate_per_s must be positive".into());
        }
        if self.battery.discharge_per_m < 0.0 || self.battery.idle_discharge_per_s < 0.0 {
            return Err("battery discharge rates must be non-negative".into());
        }
        match &self.arrivals {
            ArrivalSpec::FixedInterval { period_s } => {
                if *period_s <= 0.0 {
                    return Err(format!("arrival period must be positive, got {period_s}"));
                }
            }
            ArrivalSpec::PiecewisePoisson { segments } => {
                if segments.is_empty() {
                    return Err("piecewise_poisson needs at least one segment".into());
                }
                for w in segments.windows(2) {
                    if w[1].start_s <= w[0].start_s {
                        return Err("piecewise_poisson segments must be time-ordered".into());
                    }
                }
                if segments.iter().any(|s| s.rate_per_s <= 0.0) {
                    return Err("piecewise_poisson rates must be strictly positive".into());
                }
            }
        }
        if let Some(limit) = self.wall_limit_s {
            if limit <= 0.0 {
                return Err(format!("wall_limit_s must be positive, got {limit}"));
            }
        }
        Ok(())
    }

    /// Effective wall limit in ticks: ten times a generous baseline estimate
    /// of the plain-FIFO makespan unless overridden.
    pub fn wall_limit_ticks(&self) -> u64 {
        let baseline_s = self
            .wall_limit_s
            .unwrap_or_else(|| 10.0 * (self.n_bags as f64 * 120.0 / self.n_aivs as f64 + 600.0));
        (baseline_s / self.dt_s).ceil() as u64
    }
}
