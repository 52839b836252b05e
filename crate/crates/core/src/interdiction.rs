//! The interdictor: exact k-most-vital-arcs on the observed subnetwork, the
//! consistent deterministic tie-break and the greedy semi-oracle.
//!
//! All solvers work on a compact copy of the known subnetwork ([`Subnet`])
//! whose local arc ids follow the global id order, so lexicographic order on
//! local sets coincides with lexicographic order on global ids.

use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use thiserror::Error;

use crate::arcset::ArcSet;
use crate::flow::FlowNetwork;
use crate::graph::{shortest_path, shortest_path_by, Arc, ArcId, Cost, DirectedGraph, NodeId, Path, PathValue};

/// Default cap on the number of candidate blocking sets a semi-oracle may
/// evaluate.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterdictionError {
    #[error("semi-oracle enumeration exceeds the bound of {bound} candidate sets")]
    EnumerationTooLarge { bound: u64 },
    #[error("evader has no feasible path under blocking set {0}")]
    EvaderStuck(ArcSet),
}

/// What the interdictor knows: the arc set `A_{t-1}` and the cost he
/// observed for each of those arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservedView<'g> {
    graph: &'g DirectedGraph,
    known: ArcSet,
    observed: Vec<Cost>,
}

impl<'g> ObservedView<'g> {
    /// Knowledge of `initial` at nominal cost.
    pub fn new(graph: &'g DirectedGraph, initial: &ArcSet) -> Self {
        let known: ArcSet = initial.iter().filter(|&a| a < graph.arc_count()).collect();
        Self {
            graph,
            known,
            observed: graph.arcs().iter().map(|a| a.cost).collect(),
        }
    }

    pub fn graph(&self) -> &'g DirectedGraph {
        self.graph
    }

    pub fn known(&self) -> &ArcSet {
        &self.known
    }

    pub fn observed_cost(&self, arc: ArcId) -> Cost {
        self.observed[arc]
    }

    pub fn is_known(&self, arc: ArcId) -> bool {
        self.known.contains(arc)
    }

    /// Adds `arc` with the given observation. Returns false, leaving the
    /// earlier observation in place, if the arc was already known.
    pub fn reveal(&mut self, arc: ArcId, observed: Cost) -> bool {
        if self.known.insert(arc) {
            self.observed[arc] = observed;
            true
        } else {
            false
        }
    }

    /// Reveals every arc of `path` at nominal cost.
    pub fn reveal_nominal(&mut self, path: &Path) {
        for &a in &path.arcs {
            let c = self.graph.arc(a).cost;
            self.reveal(a, c);
        }
    }

    pub fn removable_known(&self) -> ArcSet {
        self.known
            .iter()
            .filter(|&a| self.graph.arc(a).removable)
            .collect()
    }

    /// Shortest path in the known subnetwork under observed costs.
    pub fn shortest_path(&self, blocked: &ArcSet) -> Option<Path> {
        shortest_path_by(
            self.graph,
            |a| self.observed[a],
            |a| self.known.contains(a) && !blocked.contains(a),
        )
    }

    pub fn value(&self, blocked: &ArcSet) -> PathValue {
        PathValue::from(self.shortest_path(blocked).as_ref())
    }

    fn key(&self) -> ViewKey {
        ViewKey {
            known: self.known.clone(),
            costs: self.known.iter().map(|a| self.observed[a]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct ViewKey {
    known: ArcSet,
    costs: Vec<Cost>,
}

/// A blocking set `I_t` together with the value of the known subnetwork
/// after blocking it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterdictionDecision {
    pub blocked: ArcSet,
    pub known_value: PathValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InterdictorKind {
    /// Lexicographically smallest optimal blocking set of maximum size.
    Consistent,
    /// Among optimal blocking sets of maximum size, the one maximizing the
    /// evader's loss in the current epoch.
    SemiOracle,
}

/// How the evader will respond to a candidate blocking set; the semi-oracle
/// maximizes this loss.
pub trait ResponseModel {
    fn loss(&mut self, blocked: &ArcSet) -> Result<PathValue, InterdictionError>;

    /// For responses whose loss is nondecreasing in the blocking set, the loss
    /// under `superset`, which bounds the loss of every subset. `None` turns
    /// off subtree pruning.
    fn monotone_bound(&mut self, _superset: &ArcSet) -> Option<PathValue> {
        None
    }
}

/// The greedy evader: loss is the shortest-path value of the true network
/// after blocking.
pub struct GreedyResponse<'g> {
    pub truth: &'g DirectedGraph,
}

impl ResponseModel for GreedyResponse<'_> {
    fn loss(&mut self, blocked: &ArcSet) -> Result<PathValue, InterdictionError> {
        Ok(PathValue::from(shortest_path(self.truth, blocked).as_ref()))
    }

    fn monotone_bound(&mut self, superset: &ArcSet) -> Option<PathValue> {
        Some(PathValue::from(shortest_path(self.truth, superset).as_ref()))
    }
}

// ---------------------------------------------------------------------------
// Compact known subnetwork
// ---------------------------------------------------------------------------

struct Subnet {
    graph: DirectedGraph,
    global: Vec<ArcId>,
    removable: Vec<usize>,
}

impl Subnet {
    fn from_view(view: &ObservedView<'_>) -> Self {
        let truth = view.graph;
        let mut arcs = Vec::with_capacity(view.known.len());
        let mut global = Vec::with_capacity(view.known.len());
        for a in view.known.iter() {
            let arc = truth.arc(a);
            arcs.push(Arc {
                id: arcs.len(),
                cost: view.observed[a],
                ..*arc
            });
            global.push(a);
        }
        let removable = arcs.iter().filter(|a| a.removable).map(|a| a.id).collect();
        let graph = DirectedGraph::new_unconnected(truth.node_count(), truth.source(), truth.sink(), arcs)
            .expect("subnetwork of a valid graph is valid");
        Subnet {
            graph,
            global,
            removable,
        }
    }

    fn to_global(&self, local: &ArcSet) -> ArcSet {
        local.iter().map(|l| self.global[l]).collect()
    }

    fn cost(&self, a: usize) -> Cost {
        self.graph.arc(a).cost
    }

    fn shortest(&self, blocked: &ArcSet) -> Option<Path> {
        shortest_path(&self.graph, blocked)
    }

    fn value(&self, blocked: &ArcSet) -> PathValue {
        PathValue::from(self.shortest(blocked).as_ref())
    }

    /// Cheapest walk from `from` to every node over arcs accepted by `usable`.
    fn distances(&self, from: NodeId, usable: impl Fn(usize) -> bool) -> Vec<Option<Cost>> {
        let g = &self.graph;
        let mut dist: Vec<Option<Cost>> = vec![None; g.node_count()];
        let mut heap = BinaryHeap::new();
        dist[from] = Some(0);
        heap.push(Reverse((0, from)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist[u].is_some_and(|best| d > best) {
                continue;
            }
            for &a in g.out_arcs(u) {
                if !usable(a) {
                    continue;
                }
                let v = g.arc(a).head;
                let nd = d + self.cost(a);
                if dist[v].is_none_or(|cur| nd < cur) {
                    dist[v] = Some(nd);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        dist
    }

    /// If blocking at most `budget` arcs of `pool` (beyond `blocked`) can
    /// disconnect the subnetwork, returns such a cut.
    fn cut_within(&self, blocked: &ArcSet, pool: &ArcSet, budget: usize) -> Option<ArcSet> {
        let g = &self.graph;
        let big = budget as u64 + 1;
        let mut net = FlowNetwork::new(g.node_count());
        let mut cuttable = Vec::new();
        for arc in g.arcs() {
            if blocked.contains(arc.id) {
                continue;
            }
            let cap = if pool.contains(arc.id) { 1 } else { big };
            let e = net.add_edge(arc.tail, arc.head, cap);
            if cap == 1 {
                cuttable.push((e, arc.id));
            }
        }
        if net.max_flow(g.source(), g.sink(), big) > budget as u64 {
            return None;
        }
        let side = net.reachable_from(g.source());
        Some(
            cuttable
                .into_iter()
                .filter(|&(_, a)| {
                    let arc = g.arc(a);
                    side[arc.tail] && !side[arc.head]
                })
                .map(|(_, a)| a)
                .collect(),
        )
    }

    /// Maximum of `z(subnet \ (forced ∪ J))` over `J ⊆ pool`, `|J| <= budget`,
    /// with the blocking set attaining it. With a `target` the search stops
    /// as soon as the target is reached and prunes branches that cannot
    /// reach it, so the returned value is exact only when it is below the
    /// target or equal to it.
    fn max_value(
        &self,
        forced: &ArcSet,
        pool: &ArcSet,
        budget: usize,
        target: Option<PathValue>,
    ) -> (PathValue, ArcSet) {
        let mut blocked = forced.clone();
        let mut best = (self.value(&blocked), blocked.clone());
        if best.0.is_unreachable() || budget == 0 {
            return best;
        }
        if let Some(cut) = self.cut_within(&blocked, pool, budget) {
            blocked.union_with(&cut);
            return (PathValue::Unreachable, blocked);
        }
        let mut search = BranchSearch {
            net: self,
            pool,
            fixed: ArcSet::new(),
            target,
            best: &mut best,
        };
        search.branch(&mut blocked, budget);
        best
    }
}

/// Depth-first branch and bound over arcs of the current shortest path.
///
/// Any blocking set that improves on the current value must hit the current
/// shortest path. Branch `i` blocks the `i`-th candidate arc of that path and
/// fixes the earlier candidates as unblockable, which partitions the search
/// space without repeats.
struct BranchSearch<'a> {
    net: &'a Subnet,
    pool: &'a ArcSet,
    fixed: ArcSet,
    target: Option<PathValue>,
    best: &'a mut (PathValue, ArcSet),
}

impl BranchSearch<'_> {
    fn done(&self) -> bool {
        self.best.0.is_unreachable() || self.target.is_some_and(|t| self.best.0 >= t)
    }

    fn branch(&mut self, blocked: &mut ArcSet, budget: usize) {
        let Some(sp) = self.net.shortest(blocked) else {
            *self.best = (PathValue::Unreachable, blocked.clone());
            return;
        };
        let value = PathValue::Finite(sp.cost);
        if value > self.best.0 {
            *self.best = (value, blocked.clone());
        }
        if budget == 0 || self.done() {
            return;
        }
        let candidates: Vec<usize> = sp
            .arcs
            .iter()
            .copied()
            .filter(|&a| self.pool.contains(a) && !self.fixed.contains(a))
            .collect();
        if candidates.is_empty() {
            return;
        }

        // Replace each blocked path arc by its cheapest detour over arcs that
        // stay unblockable in this subtree; the resulting walk survives any
        // completion, so it bounds the subtree value.
        let safe = |a: usize| !blocked.contains(a) && (!self.pool.contains(a) || self.fixed.contains(a));
        let mut by_tail: HashMap<NodeId, Vec<Option<Cost>>> = HashMap::new();
        let mut detour: Vec<(Option<Cost>, usize)> = candidates
            .iter()
            .map(|&a| {
                let arc = self.net.graph.arc(a);
                let dist = by_tail
                    .entry(arc.tail)
                    .or_insert_with(|| self.net.distances(arc.tail, safe));
                (dist[arc.head].map(|d| d.saturating_sub(arc.cost)), a)
            })
            .collect();
        // Largest detour first; a missing detour is unbounded.
        detour.sort_by_key(|&(d, a)| (Reverse(d.map_or(Cost::MAX, |x| x)), a));
        let bound = detour
            .iter()
            .take(budget)
            .try_fold(sp.cost, |acc, &(d, _)| d.map(|x| acc.saturating_add(x)))
            .map_or(PathValue::Unreachable, PathValue::Finite);
        if bound <= self.best.0 || self.target.is_some_and(|t| bound < t) {
            return;
        }

        let order: Vec<usize> = detour.iter().map(|&(_, a)| a).collect();
        for &a in &order {
            blocked.insert(a);
            self.branch(blocked, budget - 1);
            blocked.remove(a);
            self.fixed.insert(a);
            if self.done() {
                break;
            }
        }
        for &a in &order {
            self.fixed.remove(a);
        }
    }
}

// ---------------------------------------------------------------------------
// Lexicographic enumeration of optimal blocking sets
// ---------------------------------------------------------------------------

/// Walks maximum-size optimal blocking sets in lexicographic order.
///
/// A node is a prefix `chosen` of some sorted blocking set plus the pool of
/// removable arcs with larger ids. It is feasible when some completion from
/// the pool reaches the optimal value; infeasible prefixes are never expanded.
struct LexSearch<'s> {
    net: &'s Subnet,
    size: usize,
    optimum: PathValue,
    witnesses: Vec<ArcSet>,
}

enum Visit {
    Continue,
    Stop,
}

impl<'s> LexSearch<'s> {
    fn new(net: &'s Subnet, k: usize) -> Self {
        let size = k.min(net.removable.len());
        let pool: ArcSet = net.removable.iter().copied().collect();
        let (optimum, witness) = net.max_value(&ArcSet::new(), &pool, size, None);
        Self {
            net,
            size,
            optimum,
            witnesses: vec![witness],
        }
    }

    fn pool_from(&self, index: usize) -> ArcSet {
        self.net.removable[index..].iter().copied().collect()
    }

    fn feasible(&mut self, chosen: &ArcSet, next: usize) -> bool {
        let need = self.size - chosen.len();
        if self.net.removable.len() - next < need {
            return false;
        }
        let first_pool = self.net.removable.get(next).copied().unwrap_or(usize::MAX);
        let covered = |w: &ArcSet| {
            w.difference(chosen).iter().all(|a| a >= first_pool && self.net.removable.binary_search(&a).is_ok())
                && chosen.union(w).len() <= self.size
        };
        if self.witnesses.iter().any(covered) {
            return true;
        }
        let pool = self.pool_from(next);
        if self.net.value(&chosen.union(&pool)) < self.optimum {
            return false;
        }
        let (value, witness) = self.net.max_value(chosen, &pool, need, Some(self.optimum));
        if value >= self.optimum {
            self.witnesses.push(witness);
            true
        } else {
            false
        }
    }

    /// The lexicographically smallest optimal set of maximum size.
    fn first(&mut self) -> ArcSet {
        let mut chosen = ArcSet::new();
        let mut next = 0;
        while chosen.len() < self.size {
            let mut picked = false;
            for i in next..self.net.removable.len() {
                let a = self.net.removable[i];
                chosen.insert(a);
                if self.feasible(&chosen, i + 1) {
                    next = i + 1;
                    picked = true;
                    break;
                }
                chosen.remove(a);
            }
            assert!(picked, "optimal blocking set must exist");
        }
        chosen
    }

    /// Visits every optimal set in lexicographic order. `prune(chosen, pool)`
    /// may cut a subtree before it is expanded.
    fn walk(
        &mut self,
        chosen: &mut ArcSet,
        next: usize,
        prune: &mut dyn FnMut(&ArcSet, &ArcSet) -> bool,
        visit: &mut dyn FnMut(&ArcSet) -> Visit,
    ) -> Visit {
        if chosen.len() == self.size {
            return visit(chosen);
        }
        for i in next..self.net.removable.len() {
            let a = self.net.removable[i];
            chosen.insert(a);
            if self.feasible(chosen, i + 1) && !prune(chosen, &self.pool_from(i + 1)) {
                if let Visit::Stop = self.walk(chosen, i + 1, prune, visit) {
                    chosen.remove(a);
                    return Visit::Stop;
                }
            }
            chosen.remove(a);
        }
        Visit::Continue
    }
}

// ---------------------------------------------------------------------------
// Public solvers
// ---------------------------------------------------------------------------

/// Exact k-most-vital-arcs value of the observed subnetwork, with a blocking
/// set attaining it. The set is not padded.
pub fn k_most_vital(view: &ObservedView<'_>, k: usize) -> (PathValue, ArcSet) {
    let net = Subnet::from_view(view);
    let pool: ArcSet = net.removable.iter().copied().collect();
    let (value, witness) = net.max_value(&ArcSet::new(), &pool, k, None);
    (value, net.to_global(&witness))
}

/// The consistent interdictor: the lexicographically smallest optimal
/// blocking set of size `min(k, removable known arcs)`.
pub fn consistent_select(view: &ObservedView<'_>, k: usize) -> InterdictionDecision {
    let net = Subnet::from_view(view);
    let mut search = LexSearch::new(&net, k);
    let chosen = search.first();
    InterdictionDecision {
        blocked: net.to_global(&chosen),
        known_value: search.optimum,
    }
}

/// The greedy semi-oracle: among optimal blocking sets of size
/// `min(k, removable known arcs)`, the one maximizing the response loss;
/// remaining ties go to the lexicographically smallest set.
pub fn semi_oracle_select(
    view: &ObservedView<'_>,
    k: usize,
    response: &mut dyn ResponseModel,
    bound: u64,
) -> Result<InterdictionDecision, InterdictionError> {
    let net = Subnet::from_view(view);
    let mut search = LexSearch::new(&net, k);
    let optimum = search.optimum;

    let mut best: Option<(PathValue, ArcSet)> = None;
    let mut evaluated = 0u64;
    let mut failure = None;
    let best_cell = RefCell::new(&mut best);
    let response_cell = RefCell::new(response);
    let mut prune = |chosen: &ArcSet, pool: &ArcSet| {
        let Some((best_loss, _)) = best_cell.borrow().as_ref().map(|b| (b.0, ())) else {
            return false;
        };
        let superset = net.to_global(&chosen.union(pool));
        response_cell
            .borrow_mut()
            .monotone_bound(&superset)
            .is_some_and(|ub| ub <= best_loss)
    };
    let mut visit = |chosen: &ArcSet| {
        evaluated += 1;
        if evaluated > bound {
            failure = Some(InterdictionError::EnumerationTooLarge { bound });
            return Visit::Stop;
        }
        let global = net.to_global(chosen);
        match response_cell.borrow_mut().loss(&global) {
            Ok(loss) => {
                let mut best = best_cell.borrow_mut();
                if best.as_ref().is_none_or(|b| loss > b.0) {
                    **best = Some((loss, global));
                }
                if loss.is_unreachable() {
                    return Visit::Stop;
                }
                Visit::Continue
            }
            Err(e) => {
                failure = Some(e);
                Visit::Stop
            }
        }
    };
    search.walk(&mut ArcSet::new(), 0, &mut prune, &mut visit);
    if let Some(e) = failure {
        return Err(e);
    }
    let (_, blocked) = best.expect("at least one optimal blocking set exists");
    Ok(InterdictionDecision {
        blocked,
        known_value: optimum,
    })
}

/// Literal semi-oracle: enumerates every removable subset of size
/// `min(k, count)`, keeps the value-optimal ones and picks the maximum loss,
/// ties to the lexicographically smallest. Exponential; kept as a reference
/// for [`semi_oracle_select`].
pub fn semi_oracle_select_exhaustive(
    view: &ObservedView<'_>,
    k: usize,
    response: &mut dyn ResponseModel,
    bound: u64,
) -> Result<InterdictionDecision, InterdictionError> {
    let removable = view.removable_known().to_vec();
    let size = k.min(removable.len());
    if binomial(removable.len() as u64, size as u64) > bound {
        return Err(InterdictionError::EnumerationTooLarge { bound });
    }
    let mut family = Vec::new();
    let mut best_value = None;
    for_each_combination(&removable, size, &mut |set| {
        let value = view.value(set);
        match best_value {
            Some(v) if value < v => {}
            Some(v) if value == v => family.push(set.clone()),
            _ => {
                best_value = Some(value);
                family = vec![set.clone()];
            }
        }
    });
    let mut best: Option<(PathValue, ArcSet)> = None;
    for set in family {
        let loss = response.loss(&set)?;
        if best.as_ref().is_none_or(|b| loss > b.0) {
            best = Some((loss, set));
        }
    }
    Ok(InterdictionDecision {
        blocked: best.expect("nonempty family").1,
        known_value: best_value.expect("nonempty family"),
    })
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    acc
}

/// Calls `f` on every `size`-subset of `items` in lexicographic order.
pub(crate) fn for_each_combination(items: &[ArcId], size: usize, f: &mut dyn FnMut(&ArcSet)) {
    fn rec(items: &[ArcId], start: usize, size: usize, cur: &mut ArcSet, f: &mut dyn FnMut(&ArcSet)) {
        if size == 0 {
            f(cur);
            return;
        }
        for i in start..=items.len().saturating_sub(size) {
            cur.insert(items[i]);
            rec(items, i + 1, size - 1, cur, f);
            cur.remove(items[i]);
        }
    }
    if size <= items.len() {
        rec(items, 0, size, &mut ArcSet::new(), f);
    }
}

// ---------------------------------------------------------------------------
// Interdictor with memoized decisions
// ---------------------------------------------------------------------------

/// An interdictor of a given kind and budget. Decisions that do not depend
/// on evader state are memoized on the observed view, so a game run and the
/// evader's look-ahead simulations share work.
pub struct Interdictor {
    kind: InterdictorKind,
    budget: usize,
    bound: u64,
    cache: RefCell<HashMap<ViewKey, InterdictionDecision>>,
}

impl Interdictor {
    pub fn new(kind: InterdictorKind, budget: usize) -> Self {
        Self::with_bound(kind, budget, DEFAULT_ENUMERATION_BOUND)
    }

    pub fn with_bound(kind: InterdictorKind, budget: usize, bound: u64) -> Self {
        Self {
            kind,
            budget,
            bound,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn kind(&self) -> InterdictorKind {
        self.kind
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Decision when the interdictor's notion of the evader is greedy.
    pub fn decide(&self, view: &ObservedView<'_>) -> Result<InterdictionDecision, InterdictionError> {
        let key = view.key();
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let decision = match self.kind {
            InterdictorKind::Consistent => consistent_select(view, self.budget),
            InterdictorKind::SemiOracle => semi_oracle_select(
                view,
                self.budget,
                &mut GreedyResponse { truth: view.graph },
                self.bound,
            )?,
        };
        self.cache.borrow_mut().insert(key, decision.clone());
        Ok(decision)
    }

    /// Decision against an arbitrary response model. Only the consistent
    /// interdictor ignores the response; semi-oracle results are not cached.
    pub fn decide_against(
        &self,
        view: &ObservedView<'_>,
        response: &mut dyn ResponseModel,
    ) -> Result<InterdictionDecision, InterdictionError> {
        match self.kind {
            InterdictorKind::Consistent => self.decide(view),
            InterdictorKind::SemiOracle => semi_oracle_select(view, self.budget, response, self.bound),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, arcs_by_label};

    #[test]
    fn example2_initial_knowledge_is_disconnected() {
        let g = fixtures::five_node(6);
        let view = ObservedView::new(&g, &fixtures::example2_a0(&g));
        let (value, witness) = k_most_vital(&view, 2);
        assert_eq!(value, PathValue::Unreachable);
        assert!(witness.len() <= 2);
        assert!(view.value(&witness).is_unreachable());

        let d = semi_oracle_select(&view, 2, &mut GreedyResponse { truth: &g }, 1000).unwrap();
        assert_eq!(d.blocked, arcs_by_label(&g, &[(1, 4), (1, 5)]));
    }

    #[test]
    fn zero_budget_blocks_nothing() {
        let g = fixtures::five_node(6);
        let view = ObservedView::new(&g, &g.all_arcs());
        let (value, witness) = k_most_vital(&view, 0);
        assert_eq!(value, PathValue::Finite(3));
        assert!(witness.is_empty());
        assert!(consistent_select(&view, 0).blocked.is_empty());
    }

    #[test]
    fn chain_view_is_padded_to_budget() {
        let g = fixtures::five_node(6);
        let chain = arcs_by_label(&g, &[(1, 2), (2, 3), (3, 4)]);
        let view = ObservedView::new(&g, &chain);
        let d = consistent_select(&view, 2);
        assert_eq!(d.known_value, PathValue::Unreachable);
        assert_eq!(d.blocked.len(), 2);
        assert_eq!(d.blocked, arcs_by_label(&g, &[(1, 2), (2, 3)]));

        let semi = semi_oracle_select(&view, 2, &mut GreedyResponse { truth: &g }, 1000).unwrap();
        assert_eq!(semi.blocked, arcs_by_label(&g, &[(1, 2), (3, 4)]));
        assert_eq!(shortest_path(&g, &semi.blocked).unwrap().cost, 6);
    }

    #[test]
    fn single_removable_arc_caps_padding() {
        let g = fixtures::parallel_chain(3, 4);
        let view = ObservedView::new(&g, &[0].into_iter().collect());
        let d = consistent_select(&view, 3);
        assert_eq!(d.blocked.to_vec(), vec![0]);
    }

    #[test]
    fn exhaustive_bound_is_enforced() {
        let g = fixtures::twelve_node();
        let view = ObservedView::new(&g, &g.all_arcs());
        let err = semi_oracle_select_exhaustive(&view, 3, &mut GreedyResponse { truth: &g }, 10).unwrap_err();
        assert_eq!(err, InterdictionError::EnumerationTooLarge { bound: 10 });
        let err = semi_oracle_select(&view, 3, &mut GreedyResponse { truth: &g }, 0).unwrap_err();
        assert_eq!(err, InterdictionError::EnumerationTooLarge { bound: 0 });
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(25, 9), 2_042_975);
        assert_eq!(binomial(3, 5), 0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_case() -> impl Strategy<Value = (DirectedGraph, ArcSet, usize)> {
            (4usize..=6)
                .prop_flat_map(|n| {
                    let arc = (0..n, 0..n, 0u64..6, prop::bool::weighted(0.8));
                    (Just(n), prop::collection::vec(arc, 1..11), any::<u16>(), 0usize..4)
                })
                .prop_map(|(n, raw, mask, k)| {
                    let arcs: Vec<Arc> = raw
                        .into_iter()
                        .filter(|&(t, h, _, _)| t != h)
                        .enumerate()
                        .map(|(id, (tail, head, cost, removable))| Arc {
                            id,
                            tail,
                            head,
                            cost,
                            removable,
                        })
                        .collect();
                    let known = (0..arcs.len()).filter(|i| mask & (1 << i) != 0).collect();
                    let g = DirectedGraph::new_unconnected(n, 0, n - 1, arcs).unwrap();
                    (g, known, k)
                })
        }

        fn brute_value(view: &ObservedView<'_>, k: usize) -> PathValue {
            let removable = view.removable_known().to_vec();
            let mut best = view.value(&ArcSet::new());
            for size in 1..=k.min(removable.len()) {
                for_each_combination(&removable, size, &mut |set| best = best.max(view.value(set)));
            }
            best
        }

        proptest! {
            #[test]
            fn branch_and_bound_matches_enumeration((g, known, k) in arb_case()) {
                let view = ObservedView::new(&g, &known);
                let (value, witness) = k_most_vital(&view, k);
                prop_assert_eq!(value, brute_value(&view, k));
                prop_assert!(witness.len() <= k);
                prop_assert!(witness.is_subset(&view.removable_known()));
                prop_assert_eq!(view.value(&witness), value);
            }

            #[test]
            fn consistent_is_smallest_optimal_set((g, known, k) in arb_case()) {
                let view = ObservedView::new(&g, &known);
                let removable = view.removable_known().to_vec();
                let size = k.min(removable.len());
                let optimum = brute_value(&view, k);
                let mut first = None;
                for_each_combination(&removable, size, &mut |set| {
                    if first.is_none() && view.value(set) == optimum {
                        first = Some(set.clone());
                    }
                });
                let d = consistent_select(&view, k);
                prop_assert_eq!(d.known_value, optimum);
                prop_assert_eq!(Some(d.blocked), first);
            }

            #[test]
            fn pruned_semi_oracle_matches_literal((g, known, k) in arb_case()) {
                let view = ObservedView::new(&g, &known);
                let fast = semi_oracle_select(&view, k, &mut GreedyResponse { truth: &g }, 100_000).unwrap();
                let slow = semi_oracle_select_exhaustive(&view, k, &mut GreedyResponse { truth: &g }, 100_000).unwrap();
                prop_assert_eq!(fast, slow);
            }
        }
    }
}
