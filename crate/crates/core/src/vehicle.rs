//! The AIV agent: state machine, kinematics on the circulation graph,
//! battery discharge/charge, availability signal and activity accounting.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::world::{CirculationGraph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AgentId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BagId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentState {
    Idle,
    ToPickup,
    Carrying,
    ToStation,
    QueuedAtStation,
    Charging,
}

/// Battery parameters. State of charge is normalized to a capacity of 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BatteryModel {
    /// SoC fraction consumed per meter at speed factor 1.
    pub discharge_per_m: f64,
    /// SoC fraction consumed per second while not moving.
    pub idle_discharge_per_s: f64,
    /// SoC fraction restored per second while charging.
    pub charge_rate_per_s: f64,
    /// Moving at factor f costs f^speed_exponent energy per meter, so faster
    /// travel buys time with energy.
    pub speed_exponent: f64,
}

impl Default for BatteryModel {
    fn default() -> Self {
        Self {
            discharge_per_m: 1.8e-3,
            idle_discharge_per_s: 0.0,
            charge_rate_per_s: 0.05,
            speed_exponent: 2.0,
        }
    }
}

/// A bag's lifecycle from entry-treadmill arrival to exit drop-off.
/// Tick stamps are optional until the corresponding event happens;
/// `assigned_tick` is stamped when the agent commits to the mission as its
/// active task.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mission {
    pub bag: BagId,
    pub pickup: NodeId,
    pub dropoff: NodeId,
    pub assigned_tick: Option<u64>,
    pub pickup_tick: Option<u64>,
    pub drop_tick: Option<u64>,
}

impl Mission {
    pub fn new(bag: BagId, pickup: NodeId, dropoff: NodeId) -> Self {
        Self {
            bag,
            pickup,
            dropoff,
            assigned_tick: None,
            pickup_tick: None,
            drop_tick: None,
        }
    }
}

/// Where an agent is: at a node, or on an edge `offset_m` meters past `from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub from: NodeId,
    pub to: Option<NodeId>,
    pub offset_m: f64,
}

impl Position {
    pub fn at_node(node: NodeId) -> Self {
        Self {
            from: node,
            to: None,
            offset_m: 0.0,
        }
    }

    pub fn node(&self) -> Option<NodeId> {
        if self.to.is_none() {
            Some(self.from)
        } else {
            None
        }
    }
}

/// Per-agent activity counters, all in engine ticks.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AgentCounters {
    pub idle_ticks: u64,
    pub to_pickup_ticks: u64,
    pub carrying_ticks: u64,
    pub to_station_ticks: u64,
    pub queued_ticks: u64,
    pub charging_ticks: u64,
    pub missions_done: u32,
    pub mission_ticks: Vec<u64>,
    pub recharges_done: u32,
}

impl AgentCounters {
    pub fn total_ticks(&self) -> u64 {
        self.idle_ticks
            + self.to_pickup_ticks
            + self.carrying_ticks
            + self.to_station_ticks
            + self.queued_ticks
            + self.charging_ticks
    }

    pub fn busy_ticks(&self) -> u64 {
        self.to_pickup_ticks + self.carrying_ticks
    }
}

/// Events surfaced by `advance` for the engine to act on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdvanceEvent {
    /// The route is exhausted; the agent stands on its terminal node.
    RouteComplete(NodeId),
    /// SoC hit zero mid-edge. Raised exactly once; the agent freezes in place.
    Stranded,
}

#[derive(Debug, Clone)]
pub struct AivAgent {
    pub id: AgentId,
    pub state: AgentState,
    pub position: Position,
    /// Remaining nodes to visit, next target first.
    pub route: VecDeque<NodeId>,
    pub nominal_speed: f64,
    pub speed_factor: f64,
    pub soc: f64,
    pub active: Option<Mission>,
    pub queue: VecDeque<Mission>,
    pub counters: AgentCounters,
    /// Load/unload time left, in ticks.
    pub handling_remaining: u64,
    pub charge_target: f64,
    pub station: Option<NodeId>,
    pub station_arrival_tick: Option<u64>,
    pub charge_start_tick: Option<u64>,
    pub faulted: bool,
}

impl AivAgent {
    pub fn new(id: AgentId, start: NodeId, nominal_speed: f64) -> Self {
        Self {
            id,
            state: AgentState::Idle,
            position: Position::at_node(start),
            route: VecDeque::new(),
            nominal_speed,
            speed_factor: 1.0,
            soc: 1.0,
            active: None,
            queue: VecDeque::new(),
            counters: AgentCounters::default(),
            handling_remaining: 0,
            charge_target: 1.0,
            station: None,
            station_arrival_tick: None,
            charge_start_tick: None,
            faulted: false,
        }
    }

    pub fn is_moving_state(&self) -> bool {
        matches!(
            self.state,
            AgentState::ToPickup | AgentState::Carrying | AgentState::ToStation
        )
    }

    /// Move along the remaining route for `dt` seconds. Distance covered is
    /// `nominal_speed * speed_factor * dt`, split across edges; SoC drops by
    /// distance * discharge_per_m * speed_factor^speed_exponent. Movement
    /// stops on the tick the terminal node is reached.
    pub fn advance(
        &mut self,
        dt: f64,
        graph: &CirculationGraph,
        battery: &BatteryModel,
    ) -> Vec<AdvanceEvent> {
        let mut events = Vec::new();
        if self.faulted {
            return events;
        }
        let mut budget_m = self.nominal_speed * self.speed_factor * dt;
        let cost_per_m = battery.discharge_per_m * self.speed_factor.powf(battery.speed_exponent);

        while budget_m > 1e-12 {
            // Pin down the edge being traversed.
            let (to, edge_len) = match self.position.to {
                Some(to) => (
                    to,
                    graph
                        .edge_length(self.position.from, to)
                        .expect("route follows existing edges"),
                ),
                None => {
                    let Some(&next) = self.route.front() else {
                        events.push(AdvanceEvent::RouteComplete(self.position.from));
                        break;
                    };
                    if next == self.position.from {
                        self.route.pop_front();
                        continue;
                    }
                    let len = graph
                        .edge_length(self.position.from, next)
                        .expect("route follows existing edges");
                    self.position.to = Some(next);
                    self.position.offset_m = 0.0;
                    (next, len)
                }
            };

            let step = budget_m.min(edge_len - self.position.offset_m);
            let energy = step * cost_per_m;
            if energy > self.soc {
                // Run dry part-way through the step.
                let reachable = if energy > 0.0 { self.soc / cost_per_m } else { step };
                self.position.offset_m += reachable;
                self.soc = 0.0;
                self.faulted = true;
                events.push(AdvanceEvent::Stranded);
                return events;
            }
            self.soc -= energy;
            self.position.offset_m += step;
            budget_m -= step;

            if self.position.offset_m >= edge_len - 1e-9 {
                // Node reached.
                self.position = Position::at_node(to);
                if self.route.front() == Some(&to) {
                    self.route.pop_front();
                }
                if self.route.is_empty() {
                    events.push(AdvanceEvent::RouteComplete(to));
                    break;
                }
            }
        }
        events
    }

    /// One charging step toward `target`. Returns true when the target is
    /// reached (SoC snaps to it exactly).
    pub fn charge_tick(&mut self, dt: f64, battery: &BatteryModel, target: f64) -> bool {
        self.soc = (self.soc + battery.charge_rate_per_s * dt).min(1.0);
        if self.soc >= target - 1e-9 {
            self.soc = target;
            true
        } else {
            false
        }
    }

    /// Idle consumption while stationary.
    pub fn idle_tick(&mut self, dt: f64, battery: &BatteryModel) {
        self.soc = (self.soc - battery.idle_discharge_per_s * dt).max(0.0);
    }

    /// Remaining meters along the current route, including the edge underfoot.
    pub fn route_remaining_m(&self, graph: &CirculationGraph) -> f64 {
        let mut total = 0.0;
        let mut at = match self.position.to {
            Some(to) => {
                let len = graph
                    .edge_length(self.position.from, to)
                    .expect("route follows existing edges");
                total += len - self.position.offset_m;
                to
            }
            None => self.position.from,
        };
        for &next in &self.route {
            if next == at {
                continue;
            }
            total += graph.edge_length(at, next).unwrap_or(0.0);
            at = next;
        }
        total
    }

    /// Estimated seconds of work left: remaining route, handling, queued
    /// missions and any outstanding charge.
    pub fn estimated_workload_s(
        &self,
        graph: &CirculationGraph,
        battery: &BatteryModel,
        handling_s: f64,
        dt: f64,
    ) -> f64 {
        let speed = self.nominal_speed * self.speed_factor;
        let mut workload = self.handling_remaining as f64 * dt;
        match self.state {
            AgentState::Idle => {}
            AgentState::ToPickup => {
                // travel to pickup, load, carry leg, unload
                workload += self.route_remaining_m(graph) / speed;
                if let Some(m) = &self.active {
                    workload += graph.distance(m.pickup, m.dropoff).unwrap_or(0.0) / speed;
                }
                if self.handling_remaining == 0 {
                    workload += handling_s;
                }
                workload += handling_s;
            }
            AgentState::Carrying => {
                workload += self.route_remaining_m(graph) / speed;
                if self.handling_remaining == 0 {
                    workload += handling_s;
                }
            }
            AgentState::ToStation => {
                workload += self.route_remaining_m(graph) / speed;
                workload += (self.charge_target - self.soc).max(0.0) / battery.charge_rate_per_s;
            }
            AgentState::QueuedAtStation | AgentState::Charging => {
                workload += (self.charge_target - self.soc).max(0.0) / battery.charge_rate_per_s;
            }
        }
        // queued missions: travel to pickup plus delivery plus handling
        let mut from = self
            .active
            .as_ref()
            .map(|m| m.dropoff)
            .unwrap_or(match self.position.to {
                Some(to) => to,
                None => self.position.from,
            });
        for m in &self.queue {
            let leg = graph.distance(from, m.pickup).unwrap_or(0.0)
                + graph.distance(m.pickup, m.dropoff).unwrap_or(0.0);
            workload += leg / speed + 2.0 * handling_s;
            from = m.dropoff;
        }
        workload
    }

    /// Availability in [0, 1]: 1 when idle, otherwise the remaining workload
    /// measured against the reference horizon `t_ref_s`.
    pub fn availability(
        &self,
        t_ref_s: f64,
        graph: &CirculationGraph,
        battery: &BatteryModel,
        handling_s: f64,
        dt: f64,
    ) -> f64 {
        if self.state == AgentState::Idle && self.queue.is_empty() {
            return 1.0;
        }
        let workload = self.estimated_workload_s(graph, battery, handling_s, dt);
        1.0 - (workload / t_ref_s).min(1.0)
    }
}
