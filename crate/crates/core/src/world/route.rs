//! Dijkstra routing over positive edge weights.
//!
//! Heap entries carry their full path so that equal-cost alternatives settle
//! in lexicographic node-name order, which keeps routing deterministic across
//! runs and platforms.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{CirculationGraph, NodeId, RoutingError};

struct Entry {
    cost: f64,
    /// Name ranks of the path nodes, for lexicographic comparison.
    ranks: Vec<u32>,
    path: Vec<NodeId>,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert so the cheapest, lexicographically
        // smallest entry pops first.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.ranks.cmp(&self.ranks))
    }
}

pub(super) fn shortest_path(
    g: &CirculationGraph,
    from: NodeId,
    to: NodeId,
) -> Result<(Vec<NodeId>, f64), RoutingError> {
    let mut settled = vec![false; g.node_count()];
    let mut heap = BinaryHeap::new();
    heap.push(Entry {
        cost: 0.0,
        ranks: vec![g.name_rank(from)],
        path: vec![from],
    });
    while let Some(entry) = heap.pop() {
        let node = *entry.path.last().expect("paths are non-empty");
        if settled[node.index()] {
            continue;
        }
        settled[node.index()] = true;
        if node == to {
            return Ok((entry.path, entry.cost));
        }
        for &(next, len) in g.outgoing(node) {
            if settled[next.index()] {
                continue;
            }
            let mut ranks = entry.ranks.clone();
            ranks.push(g.name_rank(next));
            let mut path = entry.path.clone();
            path.push(next);
            heap.push(Entry {
                cost: entry.cost + len,
                ranks,
                path,
            });
        }
    }
    Err(RoutingError::Unreachable {
        from: g.name_of(from).to_string(),
        to: g.name_of(to).to_string(),
    })
}

pub(super) fn distance(g: &CirculationGraph, from: NodeId, to: NodeId) -> Result<f64, RoutingError> {
    distances_from(g, from)[to.index()].ok_or_else(|| RoutingError::Unreachable {
        from: g.name_of(from).to_string(),
        to: g.name_of(to).to_string(),
    })
}

/// Plain single-source distances (no path materialization).
pub(super) fn distances_from(g: &CirculationGraph, from: NodeId) -> Vec<Option<f64>> {
    #[derive(PartialEq)]
    struct Item(f64, NodeId);
    impl Eq for Item {}
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> Ordering {
            other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
        }
    }

    let mut dist: Vec<Option<f64>> = vec![None; g.node_count()];
    let mut heap = BinaryHeap::new();
    heap.push(Item(0.0, from));
    while let Some(Item(cost, node)) = heap.pop() {
        match dist[node.index()] {
            Some(d) if d <= cost => continue,
            _ => dist[node.index()] = Some(cost),
        }
        for &(next, len) in g.outgoing(node) {
            let cand = cost + len;
            if dist[next.index()].is_none_or(|d| cand < d) {
                heap.push(Item(cand, next));
            }
        }
    }
    dist
}
