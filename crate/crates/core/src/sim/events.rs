//! Append-only event log with newline-delimited JSON export.

use serde::{Deserialize, Serialize};

use crate::allocation::BidBasis;
use crate::vehicle::{AgentId, BagId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    /// Tick start time in seconds.
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum EventKind {
    Arrival {
        bag: BagId,
        dropoff: String,
    },
    Cfp {
        bag: BagId,
    },
    Bid {
        bag: BagId,
        agent: AgentId,
        cost: f64,
        basis: BidBasis,
    },
    Award {
        bag: BagId,
        agent: AgentId,
        cost: f64,
    },
    Pickup {
        bag: BagId,
        agent: AgentId,
    },
    Drop {
        bag: BagId,
        agent: AgentId,
        assigned_tick: u64,
        pickup_tick: u64,
    },
    RechargeDecision {
        agent: AgentId,
        recharge: bool,
        /// Crisp fuzzy output when a model decided; absent for the
        /// threshold policy.
        score: Option<f64>,
        soc: f64,
    },
    StationSelect {
        agent: AgentId,
        station: String,
    },
    ChargeStart {
        agent: AgentId,
        station: String,
        arrived_tick: u64,
        target: f64,
    },
    ChargeEnd {
        agent: AgentId,
        station: String,
        start_tick: u64,
        soc: f64,
    },
    SpeedChange {
        agent: AgentId,
        factor: f64,
    },
    Fault {
        agent: AgentId,
        what: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, tick: u64, dt: f64, kind: EventKind) {
        self.events.push(Event {
            tick,
            t: tick as f64 * dt,
            kind,
        });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// One JSON object per line, in emission order.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_ndjson(text: &str) -> Result<Self, serde_json::Error> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<Vec<Event>, _>>()?;
        Ok(Self { events })
    }
}
