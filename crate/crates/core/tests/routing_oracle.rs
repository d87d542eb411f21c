//! Routing checked against exhaustive path enumeration, plus metric
//! consistency properties on the shipped circulation plan.

use aivsim_core::models::DEFAULT_GRAPH_JSON;
use aivsim_core::world::{CirculationGraph, NodeId};

/// Cheapest cost over every simple path, by depth-first enumeration.
/// Exponential and intentionally naive.
fn brute_force_distance(g: &CirculationGraph, from: NodeId, to: NodeId) -> Option<f64> {
    fn dfs(
        g: &CirculationGraph,
        at: NodeId,
        to: NodeId,
        seen: &mut Vec<bool>,
        cost: f64,
        best: &mut Option<f64>,
    ) {
        if at == to {
            *best = Some(best.map_or(cost, |b: f64| b.min(cost)));
            return;
        }
        for &(next, len) in g.outgoing(at) {
            if !seen[next.index()] {
                seen[next.index()] = true;
                dfs(g, next, to, seen, cost + len, best);
                seen[next.index()] = false;
            }
        }
    }
    let mut seen = vec![false; g.node_count()];
    seen[from.index()] = true;
    let mut best = None;
    dfs(g, from, to, &mut seen, 0.0, &mut best);
    best
}

fn six_node_graph() -> CirculationGraph {
    // Braided little network with several competing routes.
    CirculationGraph::from_json(
        r#"{
        "nodes": [
            {"id": "a", "kind": "waypoint"}, {"id": "b", "kind": "waypoint"},
            {"id": "c", "kind": "waypoint"}, {"id": "d", "kind": "waypoint"},
            {"id": "e", "kind": "waypoint"}, {"id": "f", "kind": "waypoint"}
        ],
        "edges": [
            {"from": "a", "to": "b", "length_m": 7.0},
            {"from": "a", "to": "c", "length_m": 9.0},
            {"from": "a", "to": "f", "length_m": 14.0},
            {"from": "b", "to": "c", "length_m": 10.0},
            {"from": "b", "to": "d", "length_m": 15.0},
            {"from": "c", "to": "d", "length_m": 11.0},
            {"from": "c", "to": "f", "length_m": 2.0},
            {"from": "d", "to": "e", "length_m": 6.0},
            {"from": "f", "to": "e", "length_m": 9.0},
            {"from": "e", "to": "a", "length_m": 20.0},
            {"from": "f", "to": "b", "length_m": 3.0},
            {"from": "d", "to": "b", "length_m": 1.0}
        ]
    }"#,
    )
    .unwrap()
}

#[test]
fn dijkstra_matches_exhaustive_enumeration_on_the_test_graph() {
    let g = six_node_graph();
    for from in g.node_ids() {
        for to in g.node_ids() {
            let brute = brute_force_distance(&g, from, to);
            let fast = g.shortest_path(from, to).ok().map(|(_, d)| d);
            match (brute, fast) {
                (Some(b), Some(f)) => assert!(
                    (b - f).abs() < 1e-9,
                    "{} -> {}: brute {b} vs dijkstra {f}",
                    g.name_of(from),
                    g.name_of(to)
                ),
                (None, None) => {}
                other => panic!(
                    "{} -> {}: reachability disagreement {other:?}",
                    g.name_of(from),
                    g.name_of(to)
                ),
            }
        }
    }
}

#[test]
fn dijkstra_matches_enumeration_on_the_shipped_plan() {
    let g = CirculationGraph::from_json(DEFAULT_GRAPH_JSON).unwrap();
    for from in g.node_ids() {
        for to in g.node_ids() {
            let brute = brute_force_distance(&g, from, to);
            let fast = g.distance(from, to).ok();
            match (brute, fast) {
                (Some(b), Some(f)) => assert!((b - f).abs() < 1e-9),
                (None, None) => {}
                other => panic!("reachability disagreement {other:?}"),
            }
        }
    }
}

#[test]
fn shipped_plan_station_distances_match_enumeration() {
    let g = CirculationGraph::from_json(DEFAULT_GRAPH_JSON).unwrap();
    let entry = g.entry().unwrap();
    let via_api = g.distances_to_stations(entry).unwrap();
    assert_eq!(via_api.len(), 2);
    assert!(via_api[0].1 <= via_api[1].1);
    for &(station, d) in &via_api {
        let brute = brute_force_distance(&g, entry, station).unwrap();
        assert!((d - brute).abs() < 1e-9);
    }
}

#[test]
fn triangle_inequality_over_all_node_triples() {
    let g = CirculationGraph::from_json(DEFAULT_GRAPH_JSON).unwrap();
    let nodes: Vec<NodeId> = g.node_ids().collect();
    for &a in &nodes {
        for &b in &nodes {
            for &c in &nodes {
                if let (Ok(ab), Ok(bc), Ok(ac)) =
                    (g.distance(a, b), g.distance(b, c), g.distance(a, c))
                {
                    assert!(
                        ac <= ab + bc + 1e-9,
                        "d({0},{2}) = {ac} > {ab} + {bc} via {1}",
                        g.name_of(a),
                        g.name_of(b),
                        g.name_of(c)
                    );
                }
            }
        }
    }
}

#[test]
fn returned_paths_follow_real_oriented_edges() {
    let g = CirculationGraph::from_json(DEFAULT_GRAPH_JSON).unwrap();
    for from in g.node_ids() {
        for to in g.node_ids() {
            let Ok((path, dist)) = g.shortest_path(from, to) else {
                continue;
            };
            assert_eq!(path.first(), Some(&from));
            assert_eq!(path.last(), Some(&to));
            let mut total = 0.0;
            for w in path.windows(2) {
                let len = g
                    .edge_length(w[0], w[1])
                    .unwrap_or_else(|| panic!("missing edge in returned path"));
                total += len;
            }
            assert!((total - dist).abs() < 1e-9);
        }
    }
}

#[test]
fn shipped_plan_satisfies_all_circulation_invariants() {
    let g = CirculationGraph::from_json(DEFAULT_GRAPH_JSON).unwrap();
    let violations = g.validate();
    assert!(violations.is_empty(), "{violations:?}");
}
