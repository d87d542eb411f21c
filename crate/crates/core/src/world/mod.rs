//! The circulation plan: a directed weighted graph of waypoints, treadmills
//! and charging stations, plus shortest-path routing over it.

mod route;
mod station;

pub use station::StationState;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Compact handle into a graph's node table. Stable for the lifetime of the
/// graph that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Waypoint,
    EntryTreadmill,
    ExitTreadmill,
    ChargingStation,
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("malformed graph file: {0}")]
    Parse(String),
    #[error("edge references unknown node `{0}`")]
    UnknownEndpoint(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum RoutingError {
    #[error("no route from `{from}` to `{to}`")]
    Unreachable { from: String, to: String },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
}

/// A violation of the circulation-graph invariants. `validate` reports every
/// violation found, not just the first.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphViolation {
    EntryCount(usize),
    ExitCount(usize),
    StationCount(usize),
    NonPositiveEdge { from: String, to: String, length_m: f64 },
    UnreachableFromEntry { node: String },
    CannotReachEntry { node: String },
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::EntryCount(n) => {
                write!(f, "entry count must be exactly 1, found {n}")
            }
            GraphViolation::ExitCount(n) => {
                write!(f, "exit count must be at least 1, found {n}")
            }
            GraphViolation::StationCount(n) => {
                write!(f, "charging station count must be exactly 2, found {n}")
            }
            GraphViolation::NonPositiveEdge { from, to, length_m } => {
                write!(f, "edge {from} -> {to} has non-positive length {length_m}")
            }
            GraphViolation::UnreachableFromEntry { node } => {
                write!(f, "node `{node}` is unreachable from the entry treadmill")
            }
            GraphViolation::CannotReachEntry { node } => {
                write!(f, "entry treadmill is unreachable from node `{node}`")
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    name: String,
    kind: NodeKind,
    /// Rank of `name` in the lexicographic order of all node names; used for
    /// deterministic path tie-breaking.
    name_rank: u32,
}

// serde helpers for the file format
#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    nodes: Vec<NodeDef>,
    edges: Vec<EdgeFileDef>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct NodeDef {
    id: String,
    kind: NodeKind,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct EdgeFileDef {
    from: String,
    to: String,
    length_m: f64,
}

/// Directed weighted circulation graph. Immutable after load; all routing
/// queries are pure.
#[derive(Debug, Clone)]
pub struct CirculationGraph {
    nodes: Vec<Node>,
    /// Outgoing adjacency, ordered as in the source file.
    adjacency: Vec<Vec<(NodeId, f64)>>,
    by_name: BTreeMap<String, NodeId>,
}

impl CirculationGraph {
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;

        let mut by_name = BTreeMap::new();
        let mut nodes = Vec::with_capacity(file.nodes.len());
        for (i, def) in file.nodes.iter().enumerate() {
            if by_name.insert(def.id.clone(), NodeId(i as u32)).is_some() {
                return Err(GraphError::DuplicateNode(def.id.clone()));
            }
            nodes.push(Node {
                name: def.id.clone(),
                kind: def.kind,
                name_rank: 0,
            });
        }
        for (rank, id) in by_name.values().enumerate() {
            nodes[id.index()].name_rank = rank as u32;
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in &file.edges {
            let from = *by_name
                .get(&e.from)
                .ok_or_else(|| GraphError::UnknownEndpoint(e.from.clone()))?;
            let to = *by_name
                .get(&e.to)
                .ok_or_else(|| GraphError::UnknownEndpoint(e.to.clone()))?;
            adjacency[from.index()].push((to, e.length_m));
        }
        Ok(Self {
            nodes,
            adjacency,
            by_name,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    pub fn name_of(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].name
    }

    pub fn kind_of(&self, id: NodeId) -> NodeKind {
        self.nodes[id.index()].kind
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(|i| NodeId(i as u32))
    }

    pub(crate) fn name_rank(&self, id: NodeId) -> u32 {
        self.nodes[id.index()].name_rank
    }

    pub fn outgoing(&self, id: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[id.index()]
    }

    pub fn edge_length(&self, from: NodeId, to: NodeId) -> Option<f64> {
        self.adjacency[from.index()]
            .iter()
            .find(|(n, _)| *n == to)
            .map(|(_, len)| *len)
    }

    pub fn entry(&self) -> Option<NodeId> {
        self.of_kind(NodeKind::EntryTreadmill).next()
    }

    pub fn exits(&self) -> Vec<NodeId> {
        self.of_kind(NodeKind::ExitTreadmill).collect()
    }

    pub fn stations(&self) -> Vec<NodeId> {
        self.of_kind(NodeKind::ChargingStation).collect()
    }

    fn of_kind(&self, kind: NodeKind) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.kind == kind)
            .map(|(i, _)| NodeId(i as u32))
    }

    /// Check every circulation invariant; returns all violations found.
    pub fn validate(&self) -> Vec<GraphViolation> {
        let mut violations = Vec::new();

        let entries: Vec<NodeId> = self.of_kind(NodeKind::EntryTreadmill).collect();
        let exits = self.exits();
        let stations = self.stations();
        if entries.len() != 1 {
            violations.push(GraphViolation::EntryCount(entries.len()));
        }
        if exits.is_empty() {
            violations.push(GraphViolation::ExitCount(exits.len()));
        }
        if stations.len() != 2 {
            violations.push(GraphViolation::StationCount(stations.len()));
        }
        for (i, edges) in self.adjacency.iter().enumerate() {
            for &(to, len) in edges {
                if len <= 0.0 {
                    violations.push(GraphViolation::NonPositiveEdge {
                        from: self.nodes[i].name.clone(),
                        to: self.name_of(to).to_string(),
                        length_m: len,
                    });
                }
            }
        }
        if let [entry] = entries[..] {
            for &node in exits.iter().chain(&stations) {
                if self.distance(entry, node).is_err() {
                    violations.push(GraphViolation::UnreachableFromEntry {
                        node: self.name_of(node).to_string(),
                    });
                }
                if self.distance(node, entry).is_err() {
                    violations.push(GraphViolation::CannotReachEntry {
                        node: self.name_of(node).to_string(),
                    });
                }
            }
        }
        violations
    }

    /// Minimal-length directed path. Among equal-cost paths the one whose
    /// node-name sequence sorts first is returned.
    pub fn shortest_path(&self, from: NodeId, to: NodeId) -> Result<(Vec<NodeId>, f64), RoutingError> {
        route::shortest_path(self, from, to)
    }

    /// Shortest-path distance only.
    pub fn distance(&self, from: NodeId, to: NodeId) -> Result<f64, RoutingError> {
        route::distance(self, from, to)
    }

    /// Distances from `from` to every charging station, ascending by
    /// distance, ties broken by station name.
    pub fn distances_to_stations(&self, from: NodeId) -> Result<Vec<(NodeId, f64)>, RoutingError> {
        let mut out = Vec::new();
        for s in self.stations() {
            out.push((s, self.distance(from, s)?));
        }
        out.sort_by(|a, b| {
            a.1.total_cmp(&b.1)
                .then_with(|| self.name_of(a.0).cmp(self.name_of(b.0)))
        });
        Ok(out)
    }

    /// Longest finite shortest-path distance over all ordered node pairs.
    /// Distance universes of the fuzzy models are bound to this.
    pub fn diameter(&self) -> f64 {
        let mut best: f64 = 0.0;
        for from in self.node_ids() {
            let dist = route::distances_from(self, from);
            for d in dist.into_iter().flatten() {
                best = best.max(d);
            }
        }
        best
    }
}

#[cfg(test)]
pub(crate) fn graph_from_parts(nodes: &[(&str, NodeKind)], edges: &[(&str, &str, f64)]) -> CirculationGraph {
    let file = GraphFile {
        nodes: nodes
            .iter()
            .map(|(id, kind)| NodeDef { id: id.to_string(), kind: *kind })
            .collect(),
        edges: edges
            .iter()
            .map(|(from, to, len)| EdgeFileDef {
                from: from.to_string(),
                to: to.to_string(),
                length_m: *len,
            })
            .collect(),
    };
    CirculationGraph::from_json(&serde_json::to_string(&file).unwrap()).unwrap()
}
