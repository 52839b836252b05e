//! Ground-truth network, deterministic shortest paths and structural checks.
//!
//! Arc costs are nonnegative integers. The shortest-path tie-break is global:
//! minimum cost, then fewest arcs, then the lexicographically smallest arc-id
//! sequence read from the source.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use thiserror::Error;

use crate::arcset::ArcSet;
use crate::flow::FlowNetwork;

pub type NodeId = usize;
pub type ArcId = usize;
pub type Cost = u64;

/// A path cost, or the absence of any path. `Unreachable` orders above every
/// finite value, so disconnecting a network is the strongest interdiction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathValue {
    Finite(Cost),
    Unreachable,
}

impl PathValue {
    pub fn finite(self) -> Option<Cost> {
        match self {
            PathValue::Finite(c) => Some(c),
            PathValue::Unreachable => None,
        }
    }

    pub fn is_unreachable(self) -> bool {
        matches!(self, PathValue::Unreachable)
    }

    pub fn saturating_add(self, other: PathValue) -> PathValue {
        match (self, other) {
            (PathValue::Finite(a), PathValue::Finite(b)) => PathValue::Finite(a.saturating_add(b)),
            _ => PathValue::Unreachable,
        }
    }
}

impl From<Option<&Path>> for PathValue {
    fn from(path: Option<&Path>) -> Self {
        path.map_or(PathValue::Unreachable, |p| PathValue::Finite(p.cost))
    }
}

impl fmt::Display for PathValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathValue::Finite(c) => write!(f, "{c}"),
            PathValue::Unreachable => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    pub id: ArcId,
    pub tail: NodeId,
    pub head: NodeId,
    pub cost: Cost,
    pub removable: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least two nodes")]
    TooFewNodes,
    #[error("source and sink coincide (node {0})")]
    SourceIsSink(NodeId),
    #[error("node {node} out of range for {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("arc {0} is a self-loop")]
    SelfLoop(ArcId),
    #[error("arc ids must be dense: expected {expected}, found {found}")]
    NonDenseIds { expected: ArcId, found: ArcId },
    #[error("invalid arc id {0}")]
    InvalidArcId(ArcId),
    #[error("sink is unreachable from source")]
    Disconnected,
}

/// Directed multigraph with a designated source and sink.
///
/// Immutable after construction. Parallel arcs are distinguished by id and
/// adjacency lists are kept in ascending id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedGraph {
    node_count: usize,
    source: NodeId,
    sink: NodeId,
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
}

impl DirectedGraph {
    /// Validates every structural invariant, including that the sink can be
    /// reached from the source.
    pub fn new(
        node_count: usize,
        source: NodeId,
        sink: NodeId,
        arcs: Vec<Arc>,
    ) -> Result<Self, GraphError> {
        let graph = Self::new_unconnected(node_count, source, sink, arcs)?;
        if shortest_path(&graph, &ArcSet::new()).is_none() {
            return Err(GraphError::Disconnected);
        }
        Ok(graph)
    }

    /// Same as [`DirectedGraph::new`] without the connectivity requirement.
    /// Used for views and intermediate constructions.
    pub fn new_unconnected(
        node_count: usize,
        source: NodeId,
        sink: NodeId,
        arcs: Vec<Arc>,
    ) -> Result<Self, GraphError> {
        if node_count < 2 {
            return Err(GraphError::TooFewNodes);
        }
        for node in [source, sink] {
            if node >= node_count {
                return Err(GraphError::NodeOutOfRange { node, node_count });
            }
        }
        if source == sink {
            return Err(GraphError::SourceIsSink(source));
        }
        let mut out_arcs = vec![Vec::new(); node_count];
        let mut in_arcs = vec![Vec::new(); node_count];
        for (expected, arc) in arcs.iter().enumerate() {
            if arc.id != expected {
                return Err(GraphError::NonDenseIds {
                    expected,
                    found: arc.id,
                });
            }
            for node in [arc.tail, arc.head] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { node, node_count });
                }
            }
            if arc.tail == arc.head {
                return Err(GraphError::SelfLoop(arc.id));
            }
            out_arcs[arc.tail].push(arc.id);
            in_arcs[arc.head].push(arc.id);
        }
        Ok(Self {
            node_count,
            source,
            sink,
            arcs,
            out_arcs,
            in_arcs,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id]
    }

    pub fn out_arcs(&self, node: NodeId) -> &[ArcId] {
        &self.out_arcs[node]
    }

    pub fn in_arcs(&self, node: NodeId) -> &[ArcId] {
        &self.in_arcs[node]
    }

    pub fn all_arcs(&self) -> ArcSet {
        ArcSet::full(self.arcs.len())
    }

    pub fn removable_arcs(&self) -> ArcSet {
        self.arcs
            .iter()
            .filter(|a| a.removable)
            .map(|a| a.id)
            .collect()
    }

    /// Nominal cost of an arc sequence.
    pub fn cost_of(&self, arcs: &[ArcId]) -> Cost {
        arcs.iter().map(|&a| self.arcs[a].cost).sum()
    }

    /// Builds a [`Path`] from arc ids, checking that they form a simple
    /// source-to-sink path.
    pub fn path(&self, arcs: Vec<ArcId>) -> Result<Path, GraphError> {
        for &a in &arcs {
            if a >= self.arcs.len() {
                return Err(GraphError::InvalidArcId(a));
            }
        }
        if !self.is_simple_st_path(&arcs) {
            return Err(GraphError::Disconnected);
        }
        let cost = self.cost_of(&arcs);
        Ok(Path { arcs, cost })
    }

    pub fn is_simple_st_path(&self, arcs: &[ArcId]) -> bool {
        let Some(first) = arcs.first() else {
            return false;
        };
        if self.arcs[*first].tail != self.source || self.arcs[*arcs.last().unwrap()].head != self.sink
        {
            return false;
        }
        let mut seen = vec![false; self.node_count];
        seen[self.source] = true;
        let mut at = self.source;
        for &a in arcs {
            let arc = &self.arcs[a];
            if arc.tail != at || seen[arc.head] {
                return false;
            }
            seen[arc.head] = true;
            at = arc.head;
        }
        true
    }

    /// Node sequence visited by `path`, starting at the source.
    pub fn path_nodes(&self, path: &Path) -> Vec<NodeId> {
        let mut nodes = vec![self.source];
        nodes.extend(path.arcs.iter().map(|&a| self.arcs[a].head));
        nodes
    }

    /// Finds an arc id by its endpoints; the smallest id wins among parallels.
    pub fn find_arc(&self, tail: NodeId, head: NodeId) -> Option<ArcId> {
        self.out_arcs
            .get(tail)?
            .iter()
            .copied()
            .find(|&a| self.arcs[a].head == head)
    }

    pub fn with_endpoints(&self, source: NodeId, sink: NodeId) -> Result<Self, GraphError> {
        Self::new(self.node_count, source, sink, self.arcs.clone())
    }
}

/// A simple source-to-sink path. `cost` is measured under the cost function
/// the path was computed with: nominal for the true network, observed for an
/// interdictor's view.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    pub arcs: Vec<ArcId>,
    pub cost: Cost,
}

impl Path {
    pub fn contains(&self, arc: ArcId) -> bool {
        self.arcs.contains(&arc)
    }

    pub fn arc_set(&self) -> ArcSet {
        self.arcs.iter().collect()
    }

    pub fn shares_arc_with(&self, other: &Path) -> bool {
        self.arcs.iter().any(|a| other.arcs.contains(a))
    }

    pub fn avoids(&self, blocked: &ArcSet) -> bool {
        self.arcs.iter().all(|&a| !blocked.contains(a))
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.arcs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

/// Shortest source-to-sink path under arbitrary per-arc costs, restricted to
/// arcs accepted by `usable`.
///
/// Runs a reverse Dijkstra from the sink on `(cost, hops)` labels and then
/// walks forward from the source taking the smallest arc id that stays on an
/// optimal path, which realizes the lexicographic tie-break directly.
pub fn shortest_path_by<C, U>(g: &DirectedGraph, cost: C, usable: U) -> Option<Path>
where
    C: Fn(ArcId) -> Cost,
    U: Fn(ArcId) -> bool,
{
    const UNSET: (Cost, usize) = (Cost::MAX, usize::MAX);
    let mut label = vec![UNSET; g.node_count];
    let mut heap = BinaryHeap::new();
    label[g.sink] = (0, 0);
    heap.push(Reverse((0, 0, g.sink)));
    while let Some(Reverse((c, h, v))) = heap.pop() {
        if (c, h) > label[v] {
            continue;
        }
        if v == g.source {
            break;
        }
        for &a in &g.in_arcs[v] {
            if !usable(a) {
                continue;
            }
            let u = g.arcs[a].tail;
            let cand = (c + cost(a), h + 1);
            if cand < label[u] {
                label[u] = cand;
                heap.push(Reverse((cand.0, cand.1, u)));
            }
        }
    }
    if label[g.source] == UNSET {
        return None;
    }
    let mut arcs = Vec::with_capacity(label[g.source].1);
    let mut at = g.source;
    while at != g.sink {
        let (c, h) = label[at];
        let next = g.out_arcs[at].iter().copied().find(|&a| {
            let head = g.arcs[a].head;
            usable(a) && label[head] != UNSET && {
                let (hc, hh) = label[head];
                hc + cost(a) == c && hh + 1 == h
            }
        })?;
        arcs.push(next);
        at = g.arcs[next].head;
    }
    Some(Path {
        cost: label[g.source].0,
        arcs,
    })
}

/// `z(G)` with the arcs in `forbidden` removed. Unknown ids are ignored.
pub fn shortest_path(g: &DirectedGraph, forbidden: &ArcSet) -> Option<Path> {
    shortest_path_by(g, |a| g.arcs[a].cost, |a| !forbidden.contains(a))
}

pub fn shortest_value(g: &DirectedGraph, forbidden: &ArcSet) -> PathValue {
    PathValue::from(shortest_path(g, forbidden).as_ref())
}

/// Arc-induced subgraph `G[A']`: all nodes, only the kept arcs, ids preserved.
#[derive(Clone, Debug)]
pub struct GraphView<'g> {
    graph: &'g DirectedGraph,
    keep: ArcSet,
}

impl<'g> GraphView<'g> {
    pub fn graph(&self) -> &'g DirectedGraph {
        self.graph
    }

    pub fn kept(&self) -> &ArcSet {
        &self.keep
    }

    pub fn arc_count(&self) -> usize {
        self.keep.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = &'g Arc> + '_ {
        self.keep.iter().map(|a| self.graph.arc(a))
    }

    pub fn shortest_path(&self, forbidden: &ArcSet) -> Option<Path> {
        let g = self.graph;
        shortest_path_by(
            g,
            |a| g.arcs[a].cost,
            |a| self.keep.contains(a) && !forbidden.contains(a),
        )
    }
}

pub fn restrict<'g>(g: &'g DirectedGraph, keep: &ArcSet) -> Result<GraphView<'g>, GraphError> {
    if let Some(bad) = keep.iter().find(|&a| a >= g.arc_count()) {
        return Err(GraphError::InvalidArcId(bad));
    }
    Ok(GraphView {
        graph: g,
        keep: keep.clone(),
    })
}

/// Replaces every unremovable arc by `k + 1` removable parallel arcs of equal
/// cost. Arcs keep their relative order; each expanded arc occupies `k + 1`
/// consecutive ids. The returned map sends each new id to its original.
pub fn expand_unremovable_with_map(g: &DirectedGraph, k: usize) -> (DirectedGraph, Vec<ArcId>) {
    let mut arcs = Vec::new();
    let mut origin = Vec::new();
    for arc in &g.arcs {
        let copies = if arc.removable { 1 } else { k + 1 };
        for _ in 0..copies {
            arcs.push(Arc {
                id: arcs.len(),
                removable: true,
                ..*arc
            });
            origin.push(arc.id);
        }
    }
    let expanded = DirectedGraph::new_unconnected(g.node_count, g.source, g.sink, arcs)
        .expect("expansion preserves structural validity");
    (expanded, origin)
}

pub fn expand_unremovable(g: &DirectedGraph, k: usize) -> DirectedGraph {
    expand_unremovable_with_map(g, k).0
}

/// Minimum number of removable arcs whose deletion separates the sink from
/// the source, capped at `limit`. Unremovable arcs cannot be cut.
pub fn min_cut_size(g: &DirectedGraph, limit: usize) -> usize {
    let mut net = FlowNetwork::new(g.node_count);
    let infinite = limit as u64 + 1;
    for arc in &g.arcs {
        net.add_edge(arc.tail, arc.head, if arc.removable { 1 } else { infinite });
    }
    net.max_flow(g.source, g.sink, limit as u64 + 1).min(limit as u64 + 1) as usize
}

/// True iff no `k` arcs form a source-sink cut.
pub fn check_not_k_separable(g: &DirectedGraph, k: usize) -> bool {
    min_cut_size(g, k + 1) > k
}
