//! The deterministic discrete-time engine: arrivals, auctions, recharge
//! decisions, station queues, agent kinematics, speed regulation and metric
//! accumulation, in a fixed sub-phase order per tick.

pub mod arrivals;
pub mod config;
pub mod events;
pub mod metrics;
pub mod rng;

pub use config::{ArrivalSpec, ExitChoice, RateSegment, SimConfig};
pub use events::{Event, EventKind, EventLog};
pub use metrics::{compute_metrics, IntegrityError, Metrics};

use std::collections::VecDeque;
use std::fs;

use crate::allocation::{
    self, anchor_node, AuctionContext, RechargeDecision, StationInfo, Strategy,
};
use crate::models::{ModelError, ScenarioModels, DEFAULT_GRAPH_JSON};
use crate::vehicle::{AdvanceEvent, AgentId, AgentState, AivAgent, Mission};
use crate::world::{CirculationGraph, GraphError, GraphViolation, NodeId, NodeKind, StationState};

use arrivals::ArrivalState;
use rng::RngStream;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("graph failed to load: {0}")]
    GraphLoad(#[from] GraphError),
    #[error("graph file `{path}`: {message}")]
    GraphFile { path: String, message: String },
    #[error("graph violates circulation invariants: {}", format_violations(.0))]
    GraphInvalid(Vec<GraphViolation>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn format_violations(v: &[GraphViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub metrics: Metrics,
    pub log: EventLog,
    /// Ticks on which a follower within the safety distance outran its
    /// leader. Zero by construction; tracked as a run-level assertion.
    pub speed_cap_violations: u64,
}

/// Execute one configured run to completion (or the wall limit).
pub fn run(config: &SimConfig) -> Result<RunOutput, SimError> {
    let mut engine = Engine::new(config.clone())?;
    engine.run_to_completion();
    Ok(engine.into_output())
}

pub struct Engine {
    cfg: SimConfig,
    strategy: Strategy,
    graph: CirculationGraph,
    models: ScenarioModels,
    entry: NodeId,
    tick: u64,
    ticks_executed: u64,
    agents: Vec<AivAgent>,
    stations: Vec<StationState>,
    arrivals: ArrivalState,
    unassigned: VecDeque<Mission>,
    pending_count: u32,
    max_pending: u32,
    delivered: u32,
    faults: u32,
    admission_wait_ticks: u64,
    speed_cap_violations: u64,
    sc1_rng: RngStream,
    rotation: Vec<AgentId>,
    speed_targets: Vec<f64>,
    log: EventLog,
    complete: bool,
    wall_ticks: u64,
}

impl Engine {
    pub fn new(cfg: SimConfig) -> Result<Self, SimError> {
        cfg.validate().map_err(SimError::Config)?;

        let graph_text = match &cfg.graph_file {
            Some(path) => fs::read_to_string(path).map_err(|e| SimError::GraphFile {
                path: path.display().to_string(),
                message: e.to_string(),
            })?,
            None => DEFAULT_GRAPH_JSON.to_string(),
        };
        let graph = CirculationGraph::from_json(&graph_text)?;
        let violations = graph.validate();
        if !violations.is_empty() {
            return Err(SimError::GraphInvalid(violations));
        }
        let models = ScenarioModels::load(&cfg.model_files, &graph)?;
        let entry = graph.entry().expect("validated graph has an entry");

        let starts = initial_positions(&graph, entry, cfg.n_aivs as usize)
            .map_err(SimError::Config)?;
        let agents: Vec<AivAgent> = starts
            .into_iter()
            .enumerate()
            .map(|(i, node)| AivAgent::new(AgentId(i as u32), node, cfg.nominal_speed_mps))
            .collect();

        let stations: Vec<StationState> =
            graph.stations().into_iter().map(StationState::new).collect();
        let arrivals = ArrivalState::new(
            cfg.arrivals.clone(),
            cfg.n_bags,
            graph.exits(),
            cfg.exit_choice,
            cfg.seed,
        );
        let rotation: Vec<AgentId> = agents.iter().map(|a| a.id).collect();
        let sc1_rng = RngStream::new(cfg.seed, "sc1_bids");
        let wall_ticks = cfg.wall_limit_ticks();
        let strategy = Strategy::new(cfg.scenario);
        let n = agents.len();

        Ok(Self {
            cfg,
            strategy,
            graph,
            models,
            entry,
            tick: 0,
            ticks_executed: 0,
            agents,
            stations,
            arrivals,
            unassigned: VecDeque::new(),
            pending_count: 0,
            max_pending: 0,
            delivered: 0,
            faults: 0,
            admission_wait_ticks: 0,
            speed_cap_violations: 0,
            sc1_rng,
            rotation,
            speed_targets: vec![1.0; n],
            log: EventLog::new(),
            complete: true,
            wall_ticks,
        })
    }

    pub fn graph(&self) -> &CirculationGraph {
        &self.graph
    }

    pub fn agents(&self) -> &[AivAgent] {
        &self.agents
    }

    /// Ticks executed so far (final after `run_to_completion`).
    pub fn ticks_executed(&self) -> u64 {
        self.ticks_executed
    }

    pub fn run_to_completion(&mut self) {
        if self.cfg.n_bags == 0 {
            self.ticks_executed = 0;
            return;
        }
        loop {
            self.step();
            if self.delivered >= self.cfg.n_bags {
                self.ticks_executed = self.tick + 1;
                break;
            }
            if self.tick + 1 >= self.wall_ticks {
                self.ticks_executed = self.tick + 1;
                self.complete = false;
                break;
            }
            self.tick += 1;
        }
    }

    /// One tick: (1) arrivals, (2) auctions, (3) idle dispatch and recharge
    /// re-checks, (4) station admissions, (5) agent movement and charging in
    /// id order, (6) speed regulation, (7) metric accumulation.
    pub fn step(&mut self) {
        self.phase_arrivals();
        self.phase_auctions();
        self.phase_idle_dispatch();
        self.phase_station_admissions();
        self.phase_agents();
        self.phase_speed();
        self.phase_accumulate();
    }

    // -- phase 1 ---------------------------------------------------------

    fn phase_arrivals(&mut self) {
        let t0 = self.tick as f64 * self.cfg.dt_s;
        let t1 = (self.tick + 1) as f64 * self.cfg.dt_s;
        for bag in self.arrivals.spawn(t0, t1) {
            let mission = Mission::new(bag.bag, self.entry, bag.dropoff);
            self.log.push(
                self.tick,
                self.cfg.dt_s,
                EventKind::Arrival {
                    bag: bag.bag,
                    dropoff: self.graph.name_of(bag.dropoff).to_string(),
                },
            );
            self.pending_count += 1;
            self.max_pending = self.max_pending.max(self.pending_count);
            self.unassigned.push_back(mission);
        }
    }

    // -- phase 2 ---------------------------------------------------------

    fn phase_auctions(&mut self) {
        loop {
            if self.unassigned.is_empty() {
                break;
            }
            let gate_open = match self.strategy.assignment() {
                allocation::AssignmentTiming::Immediate => {
                    self.agents.iter().any(|a| !a.faulted)
                }
                allocation::AssignmentTiming::GatedOnIdle => {
                    self.agents.iter().any(|a| self.strategy.may_bid(a))
                }
            };
            if !gate_open {
                break;
            }
            let mission = self.unassigned.pop_front().expect("checked non-empty");
            self.auction(mission);
        }
    }

    fn auction(&mut self, mission: Mission) {
        self.log
            .push(self.tick, self.cfg.dt_s, EventKind::Cfp { bag: mission.bag });

        let station_info = self.station_snapshot();
        let ctx = AuctionContext {
            now_tick: self.tick,
            dt: self.cfg.dt_s,
            pending_bags: self.pending_count,
            graph: &self.graph,
            battery: &self.cfg.battery,
            models: &self.models,
            thresholds: &self.cfg.thresholds,
            nominal_speed: self.cfg.nominal_speed_mps,
            stations: &station_info,
            rotation: &self.rotation,
        };
        let bidders: Vec<&AivAgent> = self
            .agents
            .iter()
            .filter(|a| self.strategy.may_bid(a))
            .collect();
        debug_assert!(!bidders.is_empty(), "auction gate admitted no bidders");
        let (winner, bids) =
            allocation::run_auction(self.strategy, &mission, &bidders, &ctx, &mut self.sc1_rng);
        let mut winning_cost = f64::NAN;
        for b in &bids {
            if b.agent == winner {
                winning_cost = b.cost;
            }
            self.log.push(
                self.tick,
                self.cfg.dt_s,
                EventKind::Bid {
                    bag: mission.bag,
                    agent: b.agent,
                    cost: b.cost,
                    basis: b.basis,
                },
            );
        }
        self.log.push(
            self.tick,
            self.cfg.dt_s,
            EventKind::Award {
                bag: mission.bag,
                agent: winner,
                cost: winning_cost,
            },
        );
        // The awarded agent cycles to the rotation tail.
        if let Some(pos) = self.rotation.iter().position(|&id| id == winner) {
            let id = self.rotation.remove(pos);
            self.rotation.push(id);
        }
        self.agents[winner.0 as usize].queue.push_back(mission);
    }

    // -- phase 3 ---------------------------------------------------------

    fn phase_idle_dispatch(&mut self) {
        for i in 0..self.agents.len() {
            let agent = &self.agents[i];
            if agent.faulted || agent.state != AgentState::Idle {
                continue;
            }
            if !agent.queue.is_empty() {
                self.start_next_mission(i);
            } else if self.cfg.battery.idle_discharge_per_s > 0.0 && self.tick.is_multiple_of(10) {
                // SoC drifts while idle; re-check the recharge decision.
                self.maybe_start_recharge(i, false);
            }
        }
    }

    fn start_next_mission(&mut self, idx: usize) {
        let agent = &mut self.agents[idx];
        let mut mission = agent.queue.pop_front().expect("caller checked queue");
        mission.assigned_tick = Some(self.tick);
        let from = anchor_node(agent);
        let (path, _) = self
            .graph
            .shortest_path(from, mission.pickup)
            .expect("pickup reachable in a validated graph");
        agent.route = path.into_iter().skip(1).collect();
        agent.state = AgentState::ToPickup;
        agent.active = Some(mission);
    }

    /// Run the recharge decision for agent `idx`. `at_drop` controls event
    /// logging of Continue decisions (idle re-checks only log recharges).
    fn maybe_start_recharge(&mut self, idx: usize, at_drop: bool) {
        let station_info = self.station_snapshot();
        let ctx = AuctionContext {
            now_tick: self.tick,
            dt: self.cfg.dt_s,
            pending_bags: self.pending_count,
            graph: &self.graph,
            battery: &self.cfg.battery,
            models: &self.models,
            thresholds: &self.cfg.thresholds,
            nominal_speed: self.cfg.nominal_speed_mps,
            stations: &station_info,
            rotation: &self.rotation,
        };
        let agent = &self.agents[idx];
        let (decision, score) = allocation::decide_recharge(self.strategy, agent, &ctx);
        let recharge = decision == RechargeDecision::Recharge;
        if recharge || at_drop {
            self.log.push(
                self.tick,
                self.cfg.dt_s,
                EventKind::RechargeDecision {
                    agent: agent.id,
                    recharge,
                    score,
                    soc: agent.soc,
                },
            );
        }
        if !recharge {
            return;
        }
        match allocation::select_station(self.strategy, agent, &ctx) {
            Ok(station) => {
                self.log.push(
                    self.tick,
                    self.cfg.dt_s,
                    EventKind::StationSelect {
                        agent: agent.id,
                        station: self.graph.name_of(station).to_string(),
                    },
                );
                let from = anchor_node(agent);
                let (path, _) = self
                    .graph
                    .shortest_path(from, station)
                    .expect("validated graphs keep stations reachable");
                let agent = &mut self.agents[idx];
                agent.route = path.into_iter().skip(1).collect();
                agent.state = AgentState::ToStation;
                agent.station = Some(station);
            }
            Err(_) => {
                // No station reachable from here: configuration fault.
                let agent = &mut self.agents[idx];
                agent.faulted = true;
                self.faults += 1;
                let id = agent.id;
                self.log.push(
                    self.tick,
                    self.cfg.dt_s,
                    EventKind::Fault {
                        agent: id,
                        what: "no reachable charging station".to_string(),
                    },
                );
            }
        }
    }

    // -- phase 4 ---------------------------------------------------------

    fn phase_station_admissions(&mut self) {
        for s in 0..self.stations.len() {
            if let Some(agent_id) = self.stations[s].admit_next() {
                self.begin_charging(agent_id.0 as usize, s);
            }
        }
    }

    fn begin_charging(&mut self, idx: usize, station_idx: usize) {
        let station_node = self.stations[station_idx].station;
        let station_info = self.station_snapshot();
        let ctx = AuctionContext {
            now_tick: self.tick,
            dt: self.cfg.dt_s,
            pending_bags: self.pending_count,
            graph: &self.graph,
            battery: &self.cfg.battery,
            models: &self.models,
            thresholds: &self.cfg.thresholds,
            nominal_speed: self.cfg.nominal_speed_mps,
            stations: &station_info,
            rotation: &self.rotation,
        };
        let target = allocation::select_recharge_target(self.strategy, &self.agents[idx], &ctx);
        let agent = &mut self.agents[idx];
        agent.state = AgentState::Charging;
        agent.charge_target = target;
        agent.charge_start_tick = Some(self.tick);
        let arrived = agent.station_arrival_tick.unwrap_or(self.tick);
        self.admission_wait_ticks += self.tick - arrived;
        let id = agent.id;
        self.log.push(
            self.tick,
            self.cfg.dt_s,
            EventKind::ChargeStart {
                agent: id,
                station: self.graph.name_of(station_node).to_string(),
                arrived_tick: arrived,
                target,
            },
        );
    }

    // -- phase 5 ---------------------------------------------------------

    fn phase_agents(&mut self) {
        for i in 0..self.agents.len() {
            if self.agents[i].faulted {
                continue;
            }
            match self.agents[i].state {
                AgentState::Idle | AgentState::QueuedAtStation => {
                    let battery = self.cfg.battery;
                    self.agents[i].idle_tick(self.cfg.dt_s, &battery);
                }
                AgentState::Charging => self.charging_tick(i),
                AgentState::ToPickup | AgentState::Carrying | AgentState::ToStation => {
                    if self.agents[i].handling_remaining > 0 {
                        self.agents[i].handling_remaining -= 1;
                        if self.agents[i].handling_remaining == 0 {
                            self.complete_handling(i);
                        }
                    } else {
                        self.movement_tick(i);
                    }
                }
            }
        }
    }

    fn charging_tick(&mut self, idx: usize) {
        let battery = self.cfg.battery;
        let dt = self.cfg.dt_s;
        let target = self.agents[idx].charge_target;
        if self.agents[idx].charge_tick(dt, &battery, target) {
            let station_node = self.agents[idx].station.expect("charging at a station");
            let station_name = self.graph.name_of(station_node).to_string();
            let start = self.agents[idx].charge_start_tick.expect("charge started");
            let id = self.agents[idx].id;
            let soc = self.agents[idx].soc;
            if let Some(st) = self.stations.iter_mut().find(|s| s.station == station_node) {
                st.release(id);
            }
            let agent = &mut self.agents[idx];
            agent.counters.recharges_done += 1;
            agent.state = AgentState::Idle;
            agent.station = None;
            agent.station_arrival_tick = None;
            agent.charge_start_tick = None;
            self.log.push(
                self.tick,
                self.cfg.dt_s,
                EventKind::ChargeEnd {
                    agent: id,
                    station: station_name,
                    start_tick: start,
                    soc,
                },
            );
        }
    }

    fn movement_tick(&mut self, idx: usize) {
        let battery = self.cfg.battery;
        let dt = self.cfg.dt_s;
        let events = {
            let agent = &mut self.agents[idx];
            agent.advance(dt, &self.graph, &battery)
        };
        for event in events {
            match event {
                AdvanceEvent::Stranded => {
                    self.faults += 1;
                    let id = self.agents[idx].id;
                    self.log.push(
                        self.tick,
                        self.cfg.dt_s,
                        EventKind::Fault {
                            agent: id,
                            what: "stranded: state of charge exhausted".to_string(),
                        },
                    );
                }
                AdvanceEvent::RouteComplete(node) => self.route_complete(idx, node),
            }
        }
    }

    fn route_complete(&mut self, idx: usize, node: NodeId) {
        let state = self.agents[idx].state;
        match state {
            AgentState::ToPickup | AgentState::Carrying => {
                let expected = {
                    let m = self.agents[idx].active.as_ref().expect("mission in flight");
                    if state == AgentState::ToPickup {
                        m.pickup
                    } else {
                        m.dropoff
                    }
                };
                if node == expected {
                    let ticks = handling_ticks(self.cfg.thresholds.handling_s, self.cfg.dt_s);
                    if ticks == 0 {
                        self.complete_handling(idx);
                    } else {
                        self.agents[idx].handling_remaining = ticks;
                    }
                }
            }
            AgentState::ToStation => {
                let station_node = self.agents[idx].station.expect("heading to a station");
                if node != station_node {
                    return;
                }
                let id = self.agents[idx].id;
                self.agents[idx].station_arrival_tick = Some(self.tick);
                let station_idx = self
                    .stations
                    .iter()
                    .position(|s| s.station == station_node)
                    .expect("station exists");
                if self.stations[station_idx].is_free() {
                    self.stations[station_idx].occupy(id);
                    self.begin_charging(idx, station_idx);
                } else {
                    self.stations[station_idx].enqueue(id);
                    self.agents[idx].state = AgentState::QueuedAtStation;
                }
            }
            _ => {}
        }
    }

    /// A load or unload timer elapsed.
    fn complete_handling(&mut self, idx: usize) {
        let state = self.agents[idx].state;
        match state {
            AgentState::ToPickup => {
                let (bag, dropoff) = {
                    let agent = &mut self.agents[idx];
                    let m = agent.active.as_mut().expect("mission in flight");
                    m.pickup_tick = Some(self.tick);
                    (m.bag, m.dropoff)
                };
                let id = self.agents[idx].id;
                self.log
                    .push(self.tick, self.cfg.dt_s, EventKind::Pickup { bag, agent: id });
                self.pending_count -= 1;
                let from = anchor_node(&self.agents[idx]);
                let (path, _) = self
                    .graph
                    .shortest_path(from, dropoff)
                    .expect("dropoff reachable in a validated graph");
                let agent = &mut self.agents[idx];
                agent.route = path.into_iter().skip(1).collect();
                agent.state = AgentState::Carrying;
            }
            AgentState::Carrying => {
                let (bag, assigned, picked) = {
                    let agent = &mut self.agents[idx];
                    let m = agent.active.as_mut().expect("mission in flight");
                    m.drop_tick = Some(self.tick);
                    (
                        m.bag,
                        m.assigned_tick.expect("assigned before drop"),
                        m.pickup_tick.expect("picked before drop"),
                    )
                };
                let id = self.agents[idx].id;
                self.log.push(
                    self.tick,
                    self.cfg.dt_s,
                    EventKind::Drop {
                        bag,
                        agent: id,
                        assigned_tick: assigned,
                        pickup_tick: picked,
                    },
                );
                self.delivered += 1;
                {
                    let agent = &mut self.agents[idx];
                    let mission_ticks = self.tick - assigned;
                    agent.counters.missions_done += 1;
                    agent.counters.mission_ticks.push(mission_ticks);
                    agent.active = None;
                    agent.state = AgentState::Idle;
                }
                // The drop transition decides recharge inline: Carrying moves
                // to Idle or ToStation.
                self.maybe_start_recharge(idx, true);
            }
            _ => {}
        }
    }

    // -- phase 6 ---------------------------------------------------------

    fn phase_speed(&mut self) {
        if !self.strategy.flags().speed_regulation {
            return;
        }
        let station_info = self.station_snapshot();
        // Re-evaluate fuzzy targets once a simulated second.
        if self.tick.is_multiple_of(10) {
            let ctx = AuctionContext {
                now_tick: self.tick,
                dt: self.cfg.dt_s,
                pending_bags: self.pending_count,
                graph: &self.graph,
                battery: &self.cfg.battery,
                models: &self.models,
                thresholds: &self.cfg.thresholds,
                nominal_speed: self.cfg.nominal_speed_mps,
                stations: &station_info,
                rotation: &self.rotation,
            };
            for (i, agent) in self.agents.iter().enumerate() {
                if !agent.is_moving_state() || agent.faulted {
                    self.speed_targets[i] = 1.0;
                    continue;
                }
                let headway = self.headway_of(i).map(|(gap, _)| gap);
                self.speed_targets[i] =
                    allocation::regulate_speed(self.strategy, agent, &ctx, headway, None);
            }
        }

        // Apply targets, then cap followers against their leaders in
        // position order so caps chain correctly.
        let mut new_factors: Vec<f64> = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, a)| if a.is_moving_state() { self.speed_targets[i] } else { 1.0 })
            .collect();
        let mut by_edge: Vec<(NodeId, NodeId, f64, usize)> = self
            .agents
            .iter()
            .enumerate()
            .filter_map(|(i, a)| {
                if !a.is_moving_state() || a.faulted {
                    return None;
                }
                a.position
                    .to
                    .map(|to| (a.position.from, to, a.position.offset_m, i))
            })
            .collect();
        // Leaders first within each edge.
        by_edge.sort_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then(b.2.total_cmp(&a.2))
                .then(a.3.cmp(&b.3))
        });
        for w in 1..by_edge.len() {
            let (ef, et, off, idx) = by_edge[w];
            let (lf, lt, loff, lidx) = by_edge[w - 1];
            if (ef, et) == (lf, lt) {
                let gap = loff - off;
                if gap < self.cfg.thresholds.d_safe_m {
                    new_factors[idx] = new_factors[idx].min(new_factors[lidx]);
                }
            }
        }
        // The cap is enforced above; verify it held.
        for w in 1..by_edge.len() {
            let (ef, et, off, idx) = by_edge[w];
            let (lf, lt, loff, lidx) = by_edge[w - 1];
            if (ef, et) == (lf, lt)
                && loff - off < self.cfg.thresholds.d_safe_m
                && new_factors[idx] > new_factors[lidx] + 1e-9
            {
                self.speed_cap_violations += 1;
            }
        }
        for (i, factor) in new_factors.into_iter().enumerate() {
            let agent = &mut self.agents[i];
            if (factor - agent.speed_factor).abs() > 1e-3 {
                let id = agent.id;
                agent.speed_factor = factor;
                self.log.push(
                    self.tick,
                    self.cfg.dt_s,
                    EventKind::SpeedChange { agent: id, factor },
                );
            } else {
                agent.speed_factor = factor;
            }
        }
    }

    /// Gap to the nearest leading agent on the same edge, with its index.
    fn headway_of(&self, idx: usize) -> Option<(f64, usize)> {
        let me = &self.agents[idx];
        let to = me.position.to?;
        let edge = (me.position.from, to);
        let mut best: Option<(f64, usize)> = None;
        for (j, other) in self.agents.iter().enumerate() {
            if j == idx || !other.is_moving_state() {
                continue;
            }
            if other.position.to == Some(edge.1) && other.position.from == edge.0 {
                let gap = other.position.offset_m - me.position.offset_m;
                if gap >= 0.0 && best.is_none_or(|(g, _)| gap < g) {
                    best = Some((gap, j));
                }
            }
        }
        best
    }

    // -- phase 7 ---------------------------------------------------------

    fn phase_accumulate(&mut self) {
        for agent in &mut self.agents {
            let c = &mut agent.counters;
            match agent.state {
                AgentState::Idle => c.idle_ticks += 1,
                AgentState::ToPickup => c.to_pickup_ticks += 1,
                AgentState::Carrying => c.carrying_ticks += 1,
                AgentState::ToStation => c.to_station_ticks += 1,
                AgentState::QueuedAtStation => c.queued_ticks += 1,
                AgentState::Charging => c.charging_ticks += 1,
            }
        }
        debug_assert!(self.station_exclusivity_holds());
    }

    fn station_exclusivity_holds(&self) -> bool {
        self.stations.iter().all(|s| {
            self.agents
                .iter()
                .filter(|a| a.state == AgentState::Charging && a.station == Some(s.station))
                .count()
                <= 1
        })
    }

    fn station_snapshot(&self) -> Vec<StationInfo> {
        self.stations
            .iter()
            .map(|s| {
                let occupant_remaining_s = s
                    .occupant
                    .map(|id| {
                        let a = &self.agents[id.0 as usize];
                        (a.charge_target - a.soc).max(0.0) / self.cfg.battery.charge_rate_per_s
                    })
                    .unwrap_or(0.0);
                // Agents already committed to this station count against it.
                let inbound = self
                    .agents
                    .iter()
                    .filter(|a| {
                        a.state == AgentState::ToStation && a.station == Some(s.station)
                    })
                    .count();
                StationInfo {
                    node: s.station,
                    occupied: s.occupant.is_some(),
                    occupant_remaining_s,
                    queue_len: s.queue_len() + inbound,
                }
            })
            .collect()
    }

    pub fn into_output(self) -> RunOutput {
        let n = self.agents.len();
        let mut metrics = Metrics::zero(n);
        metrics.max_pending = self.max_pending;
        metrics.sim_time_s = self.ticks_executed as f64 * self.cfg.dt_s;
        metrics.faults = self.faults;
        metrics.complete = self.complete;
        metrics.recharge_wait_s = self.admission_wait_ticks as f64 * self.cfg.dt_s;
        let mut charging_ticks = 0u64;
        for (i, agent) in self.agents.iter().enumerate() {
            let c = &agent.counters;
            metrics.missions_per_aiv[i] = c.missions_done;
            metrics.avg_mission_time_per_aiv[i] = if c.mission_ticks.is_empty() {
                0.0
            } else {
                c.mission_ticks.iter().sum::<u64>() as f64 * self.cfg.dt_s
                    / c.mission_ticks.len() as f64
            };
            metrics.work_rate_per_aiv[i] = if self.ticks_executed == 0 {
                0.0
            } else {
                c.busy_ticks() as f64 / self.ticks_executed as f64
            };
            metrics.recharges_per_aiv[i] = c.recharges_done;
            metrics.n_recharges += c.recharges_done;
            charging_ticks += c.charging_ticks;
        }
        metrics.recharge_time_s = charging_ticks as f64 * self.cfg.dt_s;
        RunOutput {
            metrics,
            log: self.log,
            speed_cap_violations: self.speed_cap_violations,
        }
    }
}

fn handling_ticks(handling_s: f64, dt: f64) -> u64 {
    (handling_s / dt).round() as u64
}

/// Starting nodes: waypoints ordered by distance to the entry (names break
/// ties), then the entry itself, then exits. Charging stations are never
/// parking spots.
fn initial_positions(
    graph: &CirculationGraph,
    entry: NodeId,
    n: usize,
) -> Result<Vec<NodeId>, String> {
    let mut candidates: Vec<(u8, f64, &str, NodeId)> = Vec::new();
    for node in graph.node_ids() {
        let class = match graph.kind_of(node) {
            NodeKind::Waypoint => 0,
            NodeKind::EntryTreadmill => 1,
            NodeKind::ExitTreadmill => 2,
            NodeKind::ChargingStation => continue,
        };
        let Ok(dist) = graph.distance(node, entry) else {
            continue;
        };
        candidates.push((class, dist, graph.name_of(node), node));
    }
    candidates.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.cmp(b.2))
    });
    if candidates.len() < n {
        return Err(format!(
            "graph has {} usable start nodes but the fleet needs {n}",
            candidates.len()
        ));
    }
    Ok(candidates.into_iter().take(n).map(|c| c.3).collect())
}
