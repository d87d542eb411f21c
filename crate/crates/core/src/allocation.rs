//! The supervisor's auction protocol and the eight scenario strategies:
//! bid computation, recharge decision, station selection, recharge-target
//! selection and speed regulation.

use serde::{Deserialize, Serialize};

use crate::models::ScenarioModels;
use crate::vehicle::{AgentId, AgentState, AivAgent, BatteryModel, Mission};
use crate::world::{CirculationGraph, NodeId, RoutingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Sc1,
    Sc2,
    Sc3,
    Sc4,
    Sc5,
    Sc6,
    Sc7,
    Sc8,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Sc1,
        Scenario::Sc2,
        Scenario::Sc3,
        Scenario::Sc4,
        Scenario::Sc5,
        Scenario::Sc6,
        Scenario::Sc7,
        Scenario::Sc8,
    ];

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|s| s.name().eq_ignore_ascii_case(text))
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Sc1 => "sc1",
            Scenario::Sc2 => "sc2",
            Scenario::Sc3 => "sc3",
            Scenario::Sc4 => "sc4",
            Scenario::Sc5 => "sc5",
            Scenario::Sc6 => "sc6",
            Scenario::Sc7 => "sc7",
            Scenario::Sc8 => "sc8",
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Cumulative capability flags; each scenario keeps everything its
/// predecessor had.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapabilityFlags {
    pub fuzzy_cost: bool,
    pub fuzzy_recharge: bool,
    pub fuzzy_station: bool,
    pub variable_target: bool,
    pub speed_regulation: bool,
}

/// When the supervisor assigns a pending bag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentTiming {
    /// Auction at arrival; every registered agent bids, busy or not.
    Immediate,
    /// Bags pool at the supervisor; an auction runs whenever the queue head
    /// can be offered to at least one idle agent.
    GatedOnIdle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strategy {
    pub scenario: Scenario,
}

impl Strategy {
    pub fn new(scenario: Scenario) -> Self {
        Self { scenario }
    }

    pub fn flags(self) -> CapabilityFlags {
        let n = self.scenario.number();
        CapabilityFlags {
            fuzzy_cost: n >= 4,
            fuzzy_recharge: n >= 5,
            fuzzy_station: n >= 6,
            variable_target: n >= 7,
            speed_regulation: n >= 8,
        }
    }

    /// The three crisp baselines auction at arrival (the Random and FIFO
    /// schemes ignore agent state entirely, and the availability scheme needs
    /// busy agents to be rankable); the fuzzy cost scenarios pool bags and
    /// offer them to idle agents.
    pub fn assignment(self) -> AssignmentTiming {
        if self.scenario.number() <= 3 {
            AssignmentTiming::Immediate
        } else {
            AssignmentTiming::GatedOnIdle
        }
    }

    /// Whether `agent` may bid in this strategy's auctions.
    pub fn may_bid(self, agent: &AivAgent) -> bool {
        if agent.faulted {
            return false;
        }
        match self.assignment() {
            AssignmentTiming::Immediate => true,
            AssignmentTiming::GatedOnIdle => {
                agent.state == AgentState::Idle && agent.queue.is_empty()
            }
        }
    }
}

/// What produced a bid's cost figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BidBasis {
    Random,
    Rotation,
    Availability,
    FuzzyCost,
    /// The fuzzy engine reported no-rule-fired; availability cost was used.
    AvailabilityFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bid {
    pub agent: AgentId,
    pub cost: f64,
    pub basis: BidBasis,
}

/// Per-station occupancy snapshot the engine refreshes each tick.
#[derive(Debug, Clone, Copy)]
pub struct StationInfo {
    pub node: NodeId,
    pub occupied: bool,
    /// Seconds of charge left for the current occupant (0 when free).
    pub occupant_remaining_s: f64,
    pub queue_len: usize,
}

/// Everything a bid or decision may consult, frozen for the current tick.
pub struct AuctionContext<'a> {
    pub now_tick: u64,
    pub dt: f64,
    pub pending_bags: u32,
    pub graph: &'a CirculationGraph,
    pub battery: &'a BatteryModel,
    pub models: &'a ScenarioModels,
    pub thresholds: &'a Thresholds,
    pub nominal_speed: f64,
    pub stations: &'a [StationInfo],
    /// Agent ids in rotation order (head bids lowest in the FIFO scheme).
    pub rotation: &'a [AgentId],
}

/// Crisp policy constants; every one of them is configurable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Fixed recharge trigger for the non-fuzzy scenarios.
    pub recharge_soc: f64,
    /// Fuzzy recharge output above which the agent recharges.
    pub recharge_output: f64,
    /// Fuzzy rate output at or above which the target snaps to 100%.
    pub rate_snap: f64,
    /// Pending-bag count at which urgency saturates.
    pub p_max: u32,
    /// Reference horizon for station availability, seconds.
    pub w_ref_s: f64,
    /// Safety distance for speed capping, meters.
    pub d_safe_m: f64,
    /// Reference horizon for agent availability, seconds.
    pub t_ref_s: f64,
    /// Load/unload time at each treadmill, seconds.
    pub handling_s: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            recharge_soc: 0.35,
            recharge_output: 0.5,
            rate_snap: 0.9,
            p_max: 10,
            w_ref_s: 60.0,
            d_safe_m: 5.0,
            t_ref_s: 120.0,
            handling_s: 5.0,
        }
    }
}

impl AuctionContext<'_> {
    /// Urgency in [0, 1] from the pending-bag count.
    pub fn urgency(&self) -> f64 {
        (self.pending_bags as f64 / self.thresholds.p_max as f64).min(1.0)
    }

    fn availability_of(&self, agent: &AivAgent) -> f64 {
        agent.availability(
            self.thresholds.t_ref_s,
            self.graph,
            self.battery,
            self.thresholds.handling_s,
            self.dt,
        )
    }

    /// Availability score of a station: 1 when free, otherwise discounted by
    /// the occupant's remaining charge and the queue ahead.
    pub fn station_availability(&self, info: &StationInfo) -> f64 {
        if !info.occupied && info.queue_len == 0 {
            return 1.0;
        }
        let mean_episode_s =
            (1.0 - self.thresholds.recharge_soc).max(0.0) / self.battery.charge_rate_per_s;
        let busy_s = info.occupant_remaining_s + info.queue_len as f64 * mean_episode_s;
        (1.0 - busy_s / self.thresholds.w_ref_s).max(0.0)
    }
}

/// The node an agent's travel is anchored to: where it stands, or the head of
/// the edge it is on.
pub fn anchor_node(agent: &AivAgent) -> NodeId {
    agent.position.to.unwrap_or(agent.position.from)
}

/// Meters from the agent's current position to `target`.
pub fn distance_from_agent(
    agent: &AivAgent,
    graph: &CirculationGraph,
    target: NodeId,
) -> Result<f64, RoutingError> {
    let mut extra = 0.0;
    let from = match agent.position.to {
        Some(to) => {
            let len = graph
                .edge_length(agent.position.from, to)
                .expect("agent sits on a real edge");
            extra = len - agent.position.offset_m;
            to
        }
        None => agent.position.from,
    };
    Ok(extra + graph.distance(from, target)?)
}

/// Compute one agent's bid for a bag under the given strategy.
///
/// The random scheme draws from the dedicated bid stream; the rotation scheme
/// prices by queue position; the availability scheme inverts availability;
/// the fuzzy scenarios evaluate the shipped cost model, widening the distance
/// input by the predicted recharge detour from the fifth scenario on.
pub fn bid(
    strategy: Strategy,
    agent: &AivAgent,
    mission: &Mission,
    ctx: &AuctionContext,
    rng: &mut crate::sim::rng::RngStream,
) -> Bid {
    match strategy.scenario {
        Scenario::Sc1 => Bid {
            agent: agent.id,
            cost: rng.next_f64(),
            basis: BidBasis::Random,
        },
        Scenario::Sc2 => {
            // Blind rotation: the bag goes to whoever is next in the cycle,
            // busy, charging or not.
            let position = ctx
                .rotation
                .iter()
                .position(|&id| id == agent.id)
                .unwrap_or(ctx.rotation.len());
            Bid {
                agent: agent.id,
                cost: position as f64,
                basis: BidBasis::Rotation,
            }
        }
        Scenario::Sc3 => Bid {
            agent: agent.id,
            cost: 1.0 - ctx.availability_of(agent),
            basis: BidBasis::Availability,
        },
        _ => fuzzy_cost_bid(strategy, agent, mission, ctx),
    }
}

fn fuzzy_cost_bid(
    strategy: Strategy,
    agent: &AivAgent,
    mission: &Mission,
    ctx: &AuctionContext,
) -> Bid {
    let availability = ctx.availability_of(agent);
    let to_pickup = distance_from_agent(agent, ctx.graph, mission.pickup).unwrap_or(f64::MAX / 4.0);
    let carry = ctx
        .graph
        .distance(mission.pickup, mission.dropoff)
        .unwrap_or(f64::MAX / 4.0);
    let mut distance_target = to_pickup + carry;

    if strategy.flags().fuzzy_recharge {
        // Will this mission force a recharge? If so, fold the detour's
        // time-equivalent into the distance input.
        let mission_energy = distance_target * ctx.battery.discharge_per_m;
        let soc_after = (agent.soc - mission_energy).max(0.0);
        if let Ok(stations) = ctx.graph.distances_to_stations(mission.dropoff) {
            if let Some(&(_, station_dist)) = stations.first() {
                let predicted = ctx
                    .models
                    .recharge_score(soc_after, station_dist, availability)
                    .map(|score| score > ctx.thresholds.recharge_output)
                    .unwrap_or(soc_after < ctx.thresholds.recharge_soc);
                if predicted {
                    let charge_s =
                        (1.0 - soc_after).max(0.0) / ctx.battery.charge_rate_per_s;
                    distance_target += station_dist + charge_s * ctx.nominal_speed;
                }
            }
        }
    }

    match ctx
        .models
        .mission_cost(availability, distance_target, agent.soc)
    {
        Ok(cost) => Bid {
            agent: agent.id,
            cost,
            basis: BidBasis::FuzzyCost,
        },
        Err(_) => Bid {
            agent: agent.id,
            cost: 1.0 - availability,
            basis: BidBasis::AvailabilityFallback,
        },
    }
}

/// Winner of a set of bids: minimum cost, ties to the lowest agent id.
pub fn select_winner(bids: &[Bid]) -> Option<AgentId> {
    bids.iter()
        .min_by(|a, b| a.cost.total_cmp(&b.cost).then(a.agent.cmp(&b.agent)))
        .map(|b| b.agent)
}

/// Run one auction over the eligible agents. Panics if `bidders` is empty;
/// the engine guarantees at least one registered agent.
pub fn run_auction(
    strategy: Strategy,
    mission: &Mission,
    bidders: &[&AivAgent],
    ctx: &AuctionContext,
    rng: &mut crate::sim::rng::RngStream,
) -> (AgentId, Vec<Bid>) {
    assert!(!bidders.is_empty(), "auction requires at least one bidder");
    let bids: Vec<Bid> = bidders
        .iter()
        .map(|agent| bid(strategy, agent, mission, ctx, rng))
        .collect();
    let winner = select_winner(&bids).expect("non-empty bid list");
    (winner, bids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RechargeDecision {
    Continue,
    Recharge,
}

/// Decide whether the agent should head for a charging station. Invoked at
/// mission completion and while idle with an empty queue.
pub fn decide_recharge(
    strategy: Strategy,
    agent: &AivAgent,
    ctx: &AuctionContext,
) -> (RechargeDecision, Option<f64>) {
    let threshold_policy = || {
        if agent.soc < ctx.thresholds.recharge_soc {
            RechargeDecision::Recharge
        } else {
            RechargeDecision::Continue
        }
    };
    if !strategy.flags().fuzzy_recharge {
        return (threshold_policy(), None);
    }
    let nearest = ctx
        .graph
        .distances_to_stations(anchor_node(agent))
        .ok()
        .and_then(|d| d.first().copied());
    let Some((_, station_dist)) = nearest else {
        return (threshold_policy(), None);
    };
    let availability = ctx.availability_of(agent);
    match ctx
        .models
        .recharge_score(agent.soc, station_dist, availability)
    {
        Ok(score) => {
            let decision = if score > ctx.thresholds.recharge_output {
                RechargeDecision::Recharge
            } else {
                RechargeDecision::Continue
            };
            (decision, Some(score))
        }
        Err(_) => (threshold_policy(), None),
    }
}

/// Pick the station to charge at. Crisp scenarios take the nearest; the
/// station-aware scenarios score each reachable station with the shipped
/// model and take the cheapest, ties to the nearer then the lower name.
pub fn select_station(
    strategy: Strategy,
    agent: &AivAgent,
    ctx: &AuctionContext,
) -> Result<NodeId, RoutingError> {
    let anchor = anchor_node(agent);
    let mut reachable: Vec<(NodeId, f64)> = Vec::new();
    for station in ctx.graph.stations() {
        if let Ok(d) = ctx.graph.distance(anchor, station) {
            reachable.push((station, d));
        }
    }
    reachable.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then_with(|| ctx.graph.name_of(a.0).cmp(ctx.graph.name_of(b.0)))
    });
    let Some(&(nearest, _)) = reachable.first() else {
        return Err(RoutingError::Unreachable {
            from: ctx.graph.name_of(anchor).to_string(),
            to: "charging stations".to_string(),
        });
    };
    if !strategy.flags().fuzzy_station || reachable.len() == 1 {
        return Ok(nearest);
    }

    let mut best: Option<(f64, f64, NodeId)> = None;
    for &(station, dist) in &reachable {
        let info = ctx
            .stations
            .iter()
            .find(|s| s.node == station)
            .copied()
            .unwrap_or(StationInfo {
                node: station,
                occupied: false,
                occupant_remaining_s: 0.0,
                queue_len: 0,
            });
        let availability = ctx.station_availability(&info);
        let score = match ctx.models.station_cost(dist, availability) {
            Ok(s) => s,
            Err(_) => return Ok(nearest), // no rule fired: nearest policy
        };
        let better = match &best {
            None => true,
            Some((bs, bd, bn)) => {
                score < bs - 1e-9
                    || ((score - bs).abs() <= 1e-9
                        && (dist < bd - 1e-9
                            || ((dist - bd).abs() <= 1e-9
                                && ctx.graph.name_of(station) < ctx.graph.name_of(*bn))))
            }
        };
        if better {
            best = Some((score, dist, station));
        }
    }
    Ok(best.map(|(_, _, n)| n).unwrap_or(nearest))
}

/// Target state of charge for the upcoming episode: 100% until the
/// variable-rate scenarios, which drop to 80% under pressure.
pub fn select_recharge_target(strategy: Strategy, agent: &AivAgent, ctx: &AuctionContext) -> f64 {
    if !strategy.flags().variable_target {
        return 1.0;
    }
    match ctx.models.rate_score(ctx.urgency(), agent.soc) {
        Ok(score) if score < ctx.thresholds.rate_snap => 0.8,
        _ => 1.0, // high score or no rule fired
    }
}

/// Speed factor for a moving agent. Before the speed-regulation scenario the
/// factor is pinned to 1; with it, the shipped model maps urgency and headway
/// to [0.75, 1.25] and a follower within the safety distance never exceeds
/// its leader.
pub fn regulate_speed(
    strategy: Strategy,
    _agent: &AivAgent,
    ctx: &AuctionContext,
    headway_m: Option<f64>,
    leader_factor: Option<f64>,
) -> f64 {
    if !strategy.flags().speed_regulation {
        return 1.0;
    }
    // Open road: clamp to the far end of the headway universe.
    let headway_hi = ctx
        .models
        .speed_model()
        .input_index(crate::models::vars::HEADWAY)
        .map(|i| ctx.models.speed_model().inputs()[i].hi)
        .unwrap_or(f64::MAX);
    let headway = headway_m.unwrap_or(headway_hi);
    let mut factor = ctx
        .models
        .speed_factor(ctx.urgency(), headway)
        .unwrap_or(1.0);
    if let (Some(h), Some(leader)) = (headway_m, leader_factor) {
        if h < ctx.thresholds.d_safe_m {
            factor = factor.min(leader);
        }
    }
    factor
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capability_flags_grow_monotonically() {
        let mut prev: Option<CapabilityFlags> = None;
        for sc in Scenario::ALL {
            let flags = Strategy::new(sc).flags();
            if let Some(p) = prev {
                assert!(!p.fuzzy_cost || flags.fuzzy_cost, "{sc}: lost fuzzy_cost");
                assert!(!p.fuzzy_recharge || flags.fuzzy_recharge);
                assert!(!p.fuzzy_station || flags.fuzzy_station);
                assert!(!p.variable_target || flags.variable_target);
                assert!(!p.speed_regulation || flags.speed_regulation);
            }
            prev = Some(flags);
        }
        let sc8 = Strategy::new(Scenario::Sc8).flags();
        assert!(
            sc8.fuzzy_cost
                && sc8.fuzzy_recharge
                && sc8.fuzzy_station
                && sc8.variable_target
                && sc8.speed_regulation
        );
    }

    #[test]
    fn winner_is_argmin_with_id_tiebreak() {
        let bids = vec![
            Bid { agent: AgentId(0), cost: 5.0, basis: BidBasis::Random },
            Bid { agent: AgentId(1), cost: 3.0, basis: BidBasis::Random },
            Bid { agent: AgentId(2), cost: 9.0, basis: BidBasis::Random },
        ];
        assert_eq!(select_winner(&bids), Some(AgentId(1)));

        let tied = vec![
            Bid { agent: AgentId(1), cost: 3.0, basis: BidBasis::Random },
            Bid { agent: AgentId(0), cost: 3.0, basis: BidBasis::Random },
        ];
        assert_eq!(select_winner(&tied), Some(AgentId(0)));
    }

    #[test]
    fn winner_is_invariant_under_increasing_transforms() {
        let bids = vec![
            Bid { agent: AgentId(0), cost: 5.0, basis: BidBasis::Random },
            Bid { agent: AgentId(1), cost: 3.0, basis: BidBasis::Random },
            Bid { agent: AgentId(2), cost: 9.0, basis: BidBasis::Random },
        ];
        for transform in [
            (|c: f64| c * 7.5) as fn(f64) -> f64,
            |c| c + 100.0,
            |c| c.exp(),
            |c| c.powi(3),
        ] {
            let scaled: Vec<Bid> = bids
                .iter()
                .map(|b| Bid { cost: transform(b.cost), ..*b })
                .collect();
            assert_eq!(select_winner(&scaled), select_winner(&bids));
        }
    }

    #[test]
    fn scenario_names_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(Scenario::parse(sc.name()), Some(sc));
            let json = serde_json::to_string(&sc).unwrap();
            assert_eq!(json, format!("\"{}\"", sc.name()));
        }
        assert_eq!(Scenario::parse("sc9"), None);
    }
}
