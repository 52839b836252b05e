//! The small hand-built networks used throughout the tests, the CLI presets
//! and the regression suite. Nodes are labelled 1..n in comments and assertions; the
//! graphs here use `label - 1` as node id.

use crate::arcset::ArcSet;
use crate::graph::{Arc, ArcId, Cost, DirectedGraph, NodeId};

fn build(node_count: usize, source: NodeId, sink: NodeId, spec: &[(NodeId, NodeId, Cost)]) -> DirectedGraph {
    let arcs = spec
        .iter()
        .enumerate()
        .map(|(id, &(t, h, cost))| Arc {
            id,
            tail: t - 1,
            head: h - 1,
            cost,
            removable: true,
        })
        .collect();
    DirectedGraph::new(node_count, source - 1, sink - 1, arcs).expect("fixture is well formed")
}

/// Five-node network with `s = 1`, `f = 4`; arcs (1,4) and (1,5) cost `m`.
///
/// Arc ids: 0:(1,2) 1:(2,3) 2:(3,4) 3:(1,3) 4:(1,4) 5:(2,4) 6:(1,5) 7:(5,4).
pub fn five_node(m: Cost) -> DirectedGraph {
    build(
        5,
        1,
        4,
        &[
            (1, 2, 1),
            (2, 3, 1),
            (3, 4, 1),
            (1, 3, 3),
            (1, 4, m),
            (2, 4, 3),
            (1, 5, m),
            (5, 4, 0),
        ],
    )
}

/// Arc id by 1-based endpoint labels.
pub fn arc_by_label(g: &DirectedGraph, tail: NodeId, head: NodeId) -> ArcId {
    g.find_arc(tail - 1, head - 1).expect("arc exists in fixture")
}

pub fn arcs_by_label(g: &DirectedGraph, pairs: &[(NodeId, NodeId)]) -> ArcSet {
    pairs.iter().map(|&(t, h)| arc_by_label(g, t, h)).collect()
}

/// Initial knowledge `{(1,3), (2,4), (1,4), (1,5), (5,4)}` on [`five_node`].
pub fn example2_a0(g: &DirectedGraph) -> ArcSet {
    arcs_by_label(g, &[(1, 3), (2, 4), (1, 4), (1, 5), (5, 4)])
}

/// Twelve-node network where neither the greedy nor the best arc-disjoint
/// evasion is optimal; `s = 1`, `f = 11`. Arc ids 0..=9 are the zero-cost
/// chain 1 -> 2 -> ... -> 11.
pub fn twelve_node() -> DirectedGraph {
    let mut spec: Vec<(NodeId, NodeId, Cost)> = (1..=10).map(|i| (i, i + 1, 0)).collect();
    spec.extend_from_slice(&[
        (1, 3, 1),
        (5, 11, 6),
        (7, 11, 4),
        (9, 11, 2),
        (1, 10, 9),
        (2, 4, 2),
        (2, 6, 4),
        (2, 8, 6),
        (1, 12, 11),
        (12, 11, 0),
    ]);
    build(12, 1, 11, &spec)
}

/// A chain of `nodes` nodes where every segment has a zero-cost arc (even id)
/// and a parallel arc of cost `m` (odd id).
pub fn parallel_chain(nodes: usize, m: Cost) -> DirectedGraph {
    let spec: Vec<(NodeId, NodeId, Cost)> = (1..nodes)
        .flat_map(|i| [(i, i + 1, 0), (i, i + 1, m)])
        .collect();
    build(nodes, 1, nodes, &spec)
}
