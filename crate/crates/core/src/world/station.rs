//! Charging-station occupancy: capacity one, FIFO waiting list.

use std::collections::VecDeque;

use super::NodeId;
use crate::vehicle::AgentId;

#[derive(Debug, Clone)]
pub struct StationState {
    pub station: NodeId,
    pub occupant: Option<AgentId>,
    waiting: VecDeque<AgentId>,
}

impl StationState {
    pub fn new(station: NodeId) -> Self {
        Self {
            station,
            occupant: None,
            waiting: VecDeque::new(),
        }
    }

    pub fn is_free(&self) -> bool {
        self.occupant.is_none() && self.waiting.is_empty()
    }

    pub fn queue_len(&self) -> usize {
        self.waiting.len()
    }

    pub fn waiting(&self) -> impl Iterator<Item = AgentId> + '_ {
        self.waiting.iter().copied()
    }

    /// Enqueue an arriving agent. The occupant never queues and an agent
    /// never queues twice.
    pub fn enqueue(&mut self, agent: AgentId) {
        debug_assert_ne!(self.occupant, Some(agent));
        if !self.waiting.contains(&agent) {
            self.waiting.push_back(agent);
        }
    }

    /// Admit the next waiting agent if the slot is free.
    pub fn admit_next(&mut self) -> Option<AgentId> {
        if self.occupant.is_some() {
            return None;
        }
        let next = self.waiting.pop_front()?;
        self.occupant = Some(next);
        Some(next)
    }

    /// Occupy the free slot directly (arrival at an idle station).
    pub fn occupy(&mut self, agent: AgentId) {
        debug_assert!(self.occupant.is_none());
        self.occupant = Some(agent);
    }

    pub fn release(&mut self, agent: AgentId) {
        debug_assert_eq!(self.occupant, Some(agent));
        self.occupant = None;
    }
}
