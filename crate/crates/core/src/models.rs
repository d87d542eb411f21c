//! The five scenario fuzzy models, loaded from rule-base files (or the
//! embedded defaults) and bound to a circulation graph.
//!
//! Distance-valued inputs (`DistanceTarget`, `DistanceStation`) are declared
//! on a nominal universe in the files and rescaled at load time to
//! `[0, D_max]`, where `D_max` is the longest shortest-path of the loaded
//! graph.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fuzzy::{FuzzyError, FuzzyModel};
use crate::world::CirculationGraph;

pub const DEFAULT_GRAPH_JSON: &str = include_str!("../assets/default_graph.json");
pub const COST_SC4_JSON: &str = include_str!("../assets/models/cost_sc4.json");
pub const COST_RECHARGE_SC5_JSON: &str = include_str!("../assets/models/cost_recharge_sc5.json");
pub const STATION_SC6_JSON: &str = include_str!("../assets/models/station_sc6.json");
pub const RATE_SC7_JSON: &str = include_str!("../assets/models/rate_sc7.json");
pub const SPEED_SC8_JSON: &str = include_str!("../assets/models/speed_sc8.json");

/// Variable names the engine feeds; model files must declare them.
pub mod vars {
    pub const AVAILABILITY: &str = "Availability";
    pub const DISTANCE_TARGET: &str = "DistanceTarget";
    pub const ENERGY_LEVEL: &str = "EnergyLevel";
    pub const DISTANCE_STATION: &str = "DistanceStation";
    pub const AVAILABILITY_STATION: &str = "AvailabilityStation";
    pub const URGENCY: &str = "Urgency";
    pub const HEADWAY: &str = "Headway";
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("model `{name}`: {source}")]
    Model {
        name: &'static str,
        source: FuzzyError,
    },
    #[error("model file `{path}`: {message}")]
    File { path: PathBuf, message: String },
}

/// Optional per-model file overrides; `None` uses the shipped default.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ModelFiles {
    pub cost: Option<PathBuf>,
    pub recharge: Option<PathBuf>,
    pub station: Option<PathBuf>,
    pub rate: Option<PathBuf>,
    pub speed: Option<PathBuf>,
}

/// The loaded per-scenario models with their input slots resolved.
#[derive(Debug, Clone)]
pub struct ScenarioModels {
    cost: FuzzyModel,
    cost_idx: [usize; 3], // availability, distance target, energy
    recharge: FuzzyModel,
    recharge_idx: [usize; 3], // energy, distance station, availability
    station: FuzzyModel,
    station_idx: [usize; 2], // distance station, availability station
    rate: FuzzyModel,
    rate_idx: [usize; 2], // urgency, energy
    speed: FuzzyModel,
    speed_idx: [usize; 2], // urgency, headway
}

fn load_one(
    name: &'static str,
    path: Option<&Path>,
    embedded: &str,
) -> Result<FuzzyModel, ModelError> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| ModelError::File {
            path: p.to_path_buf(),
            message: e.to_string(),
        })?,
        None => embedded.to_string(),
    };
    FuzzyModel::from_json(&text).map_err(|source| ModelError::Model { name, source })
}

impl ScenarioModels {
    /// Load all five models and rescale distance universes to the graph.
    pub fn load(files: &ModelFiles, graph: &CirculationGraph) -> Result<Self, ModelError> {
        let d_max = graph.diameter();
        let mut cost = load_one("cost_sc4", files.cost.as_deref(), COST_SC4_JSON)?;
        let mut recharge = load_one(
            "cost_recharge_sc5",
            files.recharge.as_deref(),
            COST_RECHARGE_SC5_JSON,
        )?;
        let mut station = load_one("station_sc6", files.station.as_deref(), STATION_SC6_JSON)?;
        let rate = load_one("rate_sc7", files.rate.as_deref(), RATE_SC7_JSON)?;
        let speed = load_one("speed_sc8", files.speed.as_deref(), SPEED_SC8_JSON)?;

        let wrap = |name: &'static str| move |source| ModelError::Model { name, source };
        cost.rescale_input(vars::DISTANCE_TARGET, 0.0, d_max)
            .map_err(wrap("cost_sc4"))?;
        recharge
            .rescale_input(vars::DISTANCE_STATION, 0.0, d_max)
            .map_err(wrap("cost_recharge_sc5"))?;
        station
            .rescale_input(vars::DISTANCE_STATION, 0.0, d_max)
            .map_err(wrap("station_sc6"))?;

        let cost_idx = [
            cost.input_index(vars::AVAILABILITY).map_err(wrap("cost_sc4"))?,
            cost.input_index(vars::DISTANCE_TARGET).map_err(wrap("cost_sc4"))?,
            cost.input_index(vars::ENERGY_LEVEL).map_err(wrap("cost_sc4"))?,
        ];
        let recharge_idx = [
            recharge
                .input_index(vars::ENERGY_LEVEL)
                .map_err(wrap("cost_recharge_sc5"))?,
            recharge
                .input_index(vars::DISTANCE_STATION)
                .map_err(wrap("cost_recharge_sc5"))?,
            recharge
                .input_index(vars::AVAILABILITY)
                .map_err(wrap("cost_recharge_sc5"))?,
        ];
        let station_idx = [
            station
                .input_index(vars::DISTANCE_STATION)
                .map_err(wrap("station_sc6"))?,
            station
                .input_index(vars::AVAILABILITY_STATION)
                .map_err(wrap("station_sc6"))?,
        ];
        let rate_idx = [
            rate.input_index(vars::URGENCY).map_err(wrap("rate_sc7"))?,
            rate.input_index(vars::ENERGY_LEVEL).map_err(wrap("rate_sc7"))?,
        ];
        let speed_idx = [
            speed.input_index(vars::URGENCY).map_err(wrap("speed_sc8"))?,
            speed.input_index(vars::HEADWAY).map_err(wrap("speed_sc8"))?,
        ];

        Ok(Self {
            cost,
            cost_idx,
            recharge,
            recharge_idx,
            station,
            station_idx,
            rate,
            rate_idx,
            speed,
            speed_idx,
        })
    }

    pub fn load_defaults(graph: &CirculationGraph) -> Result<Self, ModelError> {
        Self::load(&ModelFiles::default(), graph)
    }

    fn eval3(model: &FuzzyModel, idx: [usize; 3], values: [f64; 3]) -> Result<f64, FuzzyError> {
        let mut inputs = [0.0; 3];
        for (slot, v) in idx.iter().zip(values) {
            inputs[*slot] = v;
        }
        model.evaluate(&inputs)
    }

    fn eval2(model: &FuzzyModel, idx: [usize; 2], values: [f64; 2]) -> Result<f64, FuzzyError> {
        let mut inputs = [0.0; 2];
        for (slot, v) in idx.iter().zip(values) {
            inputs[*slot] = v;
        }
        model.evaluate(&inputs)
    }

    /// Mission-handling cost on the cost universe.
    pub fn mission_cost(
        &self,
        availability: f64,
        distance_target_m: f64,
        energy: f64,
    ) -> Result<f64, FuzzyError> {
        Self::eval3(&self.cost, self.cost_idx, [availability, distance_target_m, energy])
    }

    /// Recharge-decision output in [0, 1].
    pub fn recharge_score(
        &self,
        energy: f64,
        distance_station_m: f64,
        availability: f64,
    ) -> Result<f64, FuzzyError> {
        Self::eval3(
            &self.recharge,
            self.recharge_idx,
            [energy, distance_station_m, availability],
        )
    }

    /// Station-choice cost (lower is better).
    pub fn station_cost(
        &self,
        distance_station_m: f64,
        station_availability: f64,
    ) -> Result<f64, FuzzyError> {
        Self::eval2(
            &self.station,
            self.station_idx,
            [distance_station_m, station_availability],
        )
    }

    /// Recharge-target score in [0, 1]; snapped to 80% or 100% by the caller.
    pub fn rate_score(&self, urgency: f64, energy: f64) -> Result<f64, FuzzyError> {
        Self::eval2(&self.rate, self.rate_idx, [urgency, energy])
    }

    /// Speed factor on [0.75, 1.25].
    pub fn speed_factor(&self, urgency: f64, headway_m: f64) -> Result<f64, FuzzyError> {
        Self::eval2(&self.speed, self.speed_idx, [urgency, headway_m])
    }

    pub fn cost_model(&self) -> &FuzzyModel {
        &self.cost
    }

    pub fn recharge_model(&self) -> &FuzzyModel {
        &self.recharge
    }

    pub fn station_model(&self) -> &FuzzyModel {
        &self.station
    }

    pub fn rate_model(&self) -> &FuzzyModel {
        &self.rate
    }

    pub fn speed_model(&self) -> &FuzzyModel {
        &self.speed
    }
}
