//! Per-run aggregates mirroring the result tables, plus the pure replay that
//! recomputes them from an exported event log.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::events::{EventKind, EventLog};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub max_pending: u32,
    pub sim_time_s: f64,
    pub avg_mission_time_per_aiv: Vec<f64>,
    pub missions_per_aiv: Vec<u32>,
    pub work_rate_per_aiv: Vec<f64>,
    pub recharge_time_s: f64,
    pub recharge_wait_s: f64,
    pub n_recharges: u32,
    pub recharges_per_aiv: Vec<u32>,
    pub faults: u32,
    /// False when the run hit the wall limit before delivering every bag.
    pub complete: bool,
}

impl Metrics {
    pub fn zero(n_aivs: usize) -> Self {
        Self {
            max_pending: 0,
            sim_time_s: 0.0,
            avg_mission_time_per_aiv: vec![0.0; n_aivs],
            missions_per_aiv: vec![0; n_aivs],
            work_rate_per_aiv: vec![0.0; n_aivs],
            recharge_time_s: 0.0,
            recharge_wait_s: 0.0,
            n_recharges: 0,
            recharges_per_aiv: vec![0; n_aivs],
            faults: 0,
            complete: true,
        }
    }

    pub fn total_missions(&self) -> u32 {
        self.missions_per_aiv.iter().sum()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IntegrityError {
    #[error("event log timestamps decrease at index {0}")]
    TimeOrder(usize),
    #[error("award for bag {0} without a preceding cfp")]
    AwardWithoutCfp(u32),
    #[error("award for bag {0} without any preceding bid")]
    AwardWithoutBids(u32),
    #[error("{kind} event references agent {agent} out of range")]
    AgentRange { kind: &'static str, agent: u32 },
    #[error("drop for bag {0} without a preceding pickup")]
    DropWithoutPickup(u32),
}

/// Recompute metrics from an exported log. For complete runs this matches
/// the engine's live metrics exactly: both sides account in whole ticks with
/// the same rules (mission time from assignment to drop, waits at charge
/// admission, charging per episode with the terminal partial included).
pub fn compute_metrics(log: &EventLog, n_aivs: usize, dt: f64) -> Result<Metrics, IntegrityError> {
    let mut metrics = Metrics::zero(n_aivs);
    if log.is_empty() {
        return Ok(metrics);
    }

    let mut last_tick = 0u64;
    let mut pending: i64 = 0;
    let mut max_pending: i64 = 0;
    let mut cfp_seen: HashMap<u32, bool> = HashMap::new();
    let mut bids_seen: HashMap<u32, u32> = HashMap::new();
    let mut picked: HashMap<u32, bool> = HashMap::new();
    let mut mission_ticks: Vec<Vec<u64>> = vec![Vec::new(); n_aivs];
    let mut busy_ticks = vec![0u64; n_aivs];
    let mut charging_ticks = 0u64;
    let mut waiting_ticks = 0u64;
    let mut open_charges: HashMap<u32, u64> = HashMap::new();

    for (i, e) in log.events().iter().enumerate() {
        if e.tick < last_tick {
            return Err(IntegrityError::TimeOrder(i));
        }
        last_tick = e.tick;
        let check_agent = |agent: crate::vehicle::AgentId, kind: &'static str| {
            if (agent.0 as usize) < n_aivs {
                Ok(())
            } else {
                Err(IntegrityError::AgentRange { kind, agent: agent.0 })
            }
        };
        match &e.kind {
            EventKind::Arrival { .. } => {
                pending += 1;
                max_pending = max_pending.max(pending);
            }
            EventKind::Cfp { bag } => {
                cfp_seen.insert(bag.0, true);
            }
            EventKind::Bid { bag, agent, .. } => {
                check_agent(*agent, "bid")?;
                *bids_seen.entry(bag.0).or_default() += 1;
            }
            EventKind::Award { bag, agent, .. } => {
                check_agent(*agent, "award")?;
                if !cfp_seen.get(&bag.0).copied().unwrap_or(false) {
                    return Err(IntegrityError::AwardWithoutCfp(bag.0));
                }
                if bids_seen.get(&bag.0).copied().unwrap_or(0) == 0 {
                    return Err(IntegrityError::AwardWithoutBids(bag.0));
                }
            }
            EventKind::Pickup { bag, agent } => {
                check_agent(*agent, "pickup")?;
                picked.insert(bag.0, true);
                pending -= 1;
            }
            EventKind::Drop { bag, agent, assigned_tick, .. } => {
                check_agent(*agent, "drop")?;
                if !picked.get(&bag.0).copied().unwrap_or(false) {
                    return Err(IntegrityError::DropWithoutPickup(bag.0));
                }
                let a = agent.0 as usize;
                let ticks = e.tick - assigned_tick;
                mission_ticks[a].push(ticks);
                busy_ticks[a] += ticks;
            }
            EventKind::ChargeStart { agent, arrived_tick, .. } => {
                check_agent(*agent, "charge_start")?;
                waiting_ticks += e.tick - arrived_tick;
                open_charges.insert(agent.0, e.tick);
            }
            EventKind::ChargeEnd { agent, start_tick, .. } => {
                check_agent(*agent, "charge_end")?;
                open_charges.remove(&agent.0);
                charging_ticks += e.tick - start_tick;
                metrics.n_recharges += 1;
                metrics.recharges_per_aiv[agent.0 as usize] += 1;
            }
            EventKind::Fault { .. } => {
                metrics.faults += 1;
            }
            EventKind::RechargeDecision { .. }
            | EventKind::StationSelect { .. }
            | EventKind::SpeedChange { .. } => {}
        }
    }

    let ticks_executed = last_tick + 1;
    // Episodes still charging when the run ended.
    for (_, start) in open_charges {
        charging_ticks += ticks_executed - start;
    }

    metrics.max_pending = max_pending.max(0) as u32;
    metrics.sim_time_s = ticks_executed as f64 * dt;
    metrics.recharge_time_s = charging_ticks as f64 * dt;
    metrics.recharge_wait_s = waiting_ticks as f64 * dt;
    for a in 0..n_aivs {
        metrics.missions_per_aiv[a] = mission_ticks[a].len() as u32;
        metrics.avg_mission_time_per_aiv[a] = if mission_ticks[a].is_empty() {
            0.0
        } else {
            mission_ticks[a].iter().sum::<u64>() as f64 * dt / mission_ticks[a].len() as f64
        };
        metrics.work_rate_per_aiv[a] = busy_ticks[a] as f64 / ticks_executed as f64;
    }
    Ok(metrics)
}
