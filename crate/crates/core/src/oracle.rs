//! Brute-force baselines and executable checks of the two-epoch structure
//! results: which paths the interdictor must block, when greedy evasion is
//! optimal, and what an optimal deviation looks like.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arcset::ArcSet;
use crate::flow::FlowNetwork;
use crate::game::{run_game, GameConfig, GameError, GameOutcome};
use crate::graph::{check_not_k_separable, shortest_path, Arc, ArcId, Cost, DirectedGraph, NodeId, Path};
use crate::interdiction::{InterdictionError, Interdictor, InterdictorKind, ObservedView, DEFAULT_ENUMERATION_BOUND};
use crate::policies::EvaderKind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("more than {cap} source-sink paths")]
    TooManyPaths { cap: usize },
    #[error("path costs are not pairwise distinct")]
    DistinctCostsViolated,
    #[error("no feasible first-epoch path")]
    NoFeasiblePath,
    #[error(transparent)]
    Interdiction(#[from] InterdictionError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Every simple source-sink path, sorted by cost and then by arc-id
/// sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankedPaths {
    pub paths: Vec<Path>,
    pub distinct_costs: bool,
}

impl RankedPaths {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// 1-based position of `path` in the ranking.
    pub fn rank_of(&self, path: &Path) -> Option<usize> {
        self.paths
            .binary_search_by(|p| (p.cost, &p.arcs).cmp(&(path.cost, &path.arcs)))
            .ok()
            .map(|i| i + 1)
    }
}

/// Visits simple source-sink paths avoiding `forbidden` in depth-first
/// order; `keep_going(partial_cost, node)` can cut a branch.
fn walk_paths(
    g: &DirectedGraph,
    forbidden: &ArcSet,
    keep_going: &mut dyn FnMut(Cost, NodeId) -> bool,
    visit: &mut dyn FnMut(&[ArcId], Cost) -> Result<(), OracleError>,
) -> Result<(), OracleError> {
    fn rec(
        g: &DirectedGraph,
        forbidden: &ArcSet,
        at: NodeId,
        cost: Cost,
        on_path: &mut [bool],
        stack: &mut Vec<ArcId>,
        keep_going: &mut dyn FnMut(Cost, NodeId) -> bool,
        visit: &mut dyn FnMut(&[ArcId], Cost) -> Result<(), OracleError>,
    ) -> Result<(), OracleError> {
        if at == g.sink() {
            return visit(stack, cost);
        }
        for &a in g.out_arcs(at) {
            let arc = g.arc(a);
            if forbidden.contains(a) || on_path[arc.head] {
                continue;
            }
            let next = cost + arc.cost;
            if !keep_going(next, arc.head) {
                continue;
            }
            on_path[arc.head] = true;
            stack.push(a);
            rec(g, forbidden, arc.head, next, on_path, stack, keep_going, visit)?;
            stack.pop();
            on_path[arc.head] = false;
        }
        Ok(())
    }
    let mut on_path = vec![false; g.node_count()];
    on_path[g.source()] = true;
    rec(g, forbidden, g.source(), 0, &mut on_path, &mut Vec::new(), keep_going, visit)
}

pub fn enumerate_paths(truth: &DirectedGraph, forbidden: &ArcSet, cap: usize) -> Result<RankedPaths, OracleError> {
    let mut paths = Vec::new();
    walk_paths(truth, forbidden, &mut |_, _| true, &mut |arcs, cost| {
        if paths.len() == cap {
            return Err(OracleError::TooManyPaths { cap });
        }
        paths.push(Path {
            arcs: arcs.to_vec(),
            cost,
        });
        Ok(())
    })?;
    paths.sort_by(|a, b| (a.cost, &a.arcs).cmp(&(b.cost, &b.arcs)));
    let distinct_costs = paths.windows(2).all(|w| w[0].cost != w[1].cost);
    Ok(RankedPaths { paths, distinct_costs })
}

/// Limits on the brute-force searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Maximum number of first-epoch paths evaluated.
    pub path_cap: usize,
    pub enumeration_bound: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            path_cap: 200_000,
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
        }
    }
}

/// An optimal two-epoch evasion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoEpochSolution {
    pub first_block: ArcSet,
    pub first: Path,
    pub second_block: ArcSet,
    pub second: Path,
    pub total: Cost,
}

/// Minimizes `l(P1) + l(P2)` over first-epoch paths, the second-epoch block
/// following from the interdictor's rule and the second path being greedy
/// (which is optimal in a final epoch). Ties prefer the cheaper first path,
/// then the lexicographically smaller one.
///
/// The first-epoch block is chosen against a greedy response. First paths
/// whose cost plus the cost-to-go plus the unblocked shortest-path value
/// already exceeds the incumbent are skipped.
pub fn brute_force_two_epoch(
    truth: &DirectedGraph,
    initial_known: &ArcSet,
    k: usize,
    kind: InterdictorKind,
    limits: OracleLimits,
) -> Result<TwoEpochSolution, OracleError> {
    let interdictor = Interdictor::with_bound(kind, k, limits.enumeration_bound);
    let start = ObservedView::new(truth, initial_known);
    let first_block = interdictor.decide(&start)?.blocked;
    let floor = shortest_path(truth, &ArcSet::new())
        .ok_or(OracleError::NoFeasiblePath)?
        .cost;
    let to_go = distances_to_sink(truth, &first_block);

    let evaluate = |first: Path| -> Result<Option<TwoEpochSolution>, OracleError> {
        let mut view = start.clone();
        view.reveal_nominal(&first);
        let second_block = interdictor.decide(&view)?.blocked;
        Ok(shortest_path(truth, &second_block).map(|second| TwoEpochSolution {
            first_block: first_block.clone(),
            total: first.cost + second.cost,
            first,
            second_block,
            second,
        }))
    };
    let better = |a: &TwoEpochSolution, b: &TwoEpochSolution| {
        (a.total, a.first.cost, &a.first.arcs) < (b.total, b.first.cost, &b.first.arcs)
    };

    let mut best = match shortest_path(truth, &first_block) {
        Some(p) => evaluate(p)?,
        None => return Err(OracleError::NoFeasiblePath),
    };
    let mut evaluated = 1usize;
    let best_cell = std::cell::RefCell::new(&mut best);
    walk_paths(
        truth,
        &first_block,
        &mut |cost, node| {
            let Some(rest) = to_go[node] else {
                return false;
            };
            best_cell
                .borrow()
                .as_ref()
                .is_none_or(|b| cost + rest + floor <= b.total)
        },
        &mut |arcs, cost| {
            evaluated += 1;
            if evaluated > limits.path_cap {
                return Err(OracleError::TooManyPaths { cap: limits.path_cap });
            }
            let candidate = Path {
                arcs: arcs.to_vec(),
                cost,
            };
            if let Some(sol) = evaluate(candidate)? {
                let mut best = best_cell.borrow_mut();
                if best.as_ref().is_none_or(|b| better(&sol, b)) {
                    **best = Some(sol);
                }
            }
            Ok(())
        },
    )?;
    best.ok_or(OracleError::NoFeasiblePath)
}

/// Cheapest cost from every node to the sink avoiding `forbidden`.
fn distances_to_sink(g: &DirectedGraph, forbidden: &ArcSet) -> Vec<Option<Cost>> {
    let mut dist: Vec<Option<Cost>> = vec![None; g.node_count()];
    let mut heap = BinaryHeap::new();
    dist[g.sink()] = Some(0);
    heap.push(Reverse((0, g.sink())));
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v].is_some_and(|best| d > best) {
            continue;
        }
        for &a in g.in_arcs(v) {
            if forbidden.contains(a) {
                continue;
            }
            let u = g.arc(a).tail;
            let nd = d + g.arc(a).cost;
            if dist[u].is_none_or(|cur| nd < cur) {
                dist[u] = Some(nd);
                heap.push(Reverse((nd, u)));
            }
        }
    }
    dist
}

/// How path ranks are formed when path costs tie.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankingMode {
    /// Require pairwise distinct path costs.
    Strict,
    /// Break cost ties by arc-id sequence.
    TotalOrder,
}

fn ranked(truth: &DirectedGraph, mode: RankingMode, cap: usize) -> Result<RankedPaths, OracleError> {
    let ranking = enumerate_paths(truth, &ArcSet::new(), cap)?;
    if mode == RankingMode::Strict && !ranking.distinct_costs {
        return Err(OracleError::DistinctCostsViolated);
    }
    Ok(ranking)
}

/// Greedy evader against the semi-oracle for two epochs with no initial
/// knowledge.
pub fn greedy_two_epoch(truth: &DirectedGraph, k: usize) -> Result<GameOutcome<'_>, OracleError> {
    let config = GameConfig::new(2, k, InterdictorKind::SemiOracle, EvaderKind::Greedy);
    Ok(run_game(truth, &ArcSet::new(), &config)?)
}

const RANK_CAP: usize = 200_000;

/// Every path strictly cheaper than the greedy second-epoch path is hit by
/// the second-epoch block.
pub fn check_lemma1(truth: &DirectedGraph, k: usize, mode: RankingMode) -> Result<bool, OracleError> {
    let ranking = ranked(truth, mode, RANK_CAP)?;
    let game = greedy_two_epoch(truth, k)?;
    let second = &game.records[1];
    Ok(ranking
        .paths
        .iter()
        .take_while(|p| p.cost < second.traversed.cost)
        .all(|p| !p.avoids(&second.blocked)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureCase {
    GreedyOptimal,
    AlternativePair,
}

/// Outcome of the two-epoch necessary-condition check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub case: StructureCase,
    /// Ranks `(i, j)` of the optimal pair, 1-based.
    pub pair_ranks: (usize, usize),
    /// Rank of the greedy second-epoch path.
    pub greedy_rank: usize,
    /// Both optimal paths share an arc with the overall shortest path.
    pub shares_with_shortest: bool,
    /// The pair is strictly cheaper than the greedy pair.
    pub strictly_better: bool,
    /// `1 < i < r`, `1 < j < r` and `i != j`.
    pub ranks_between: bool,
}

impl StructureReport {
    /// A deviation from greedy must meet all three conditions.
    pub fn holds(&self) -> bool {
        match self.case {
            StructureCase::GreedyOptimal => true,
            StructureCase::AlternativePair => self.shares_with_shortest && self.strictly_better && self.ranks_between,
        }
    }
}

pub fn check_theorem2(truth: &DirectedGraph, k: usize, mode: RankingMode) -> Result<StructureReport, OracleError> {
    let ranking = ranked(truth, mode, RANK_CAP)?;
    let game = greedy_two_epoch(truth, k)?;
    let best = brute_force_two_epoch(
        truth,
        &ArcSet::new(),
        k,
        InterdictorKind::SemiOracle,
        OracleLimits::default(),
    )?;
    let rank = |p: &Path| ranking.rank_of(p).expect("every simple path is ranked");
    let shortest = &ranking.paths[0];
    let (i, j) = (rank(&best.first), rank(&best.second));
    let r = rank(&game.records[1].traversed);
    let case = if best.first == game.records[0].traversed {
        StructureCase::GreedyOptimal
    } else {
        StructureCase::AlternativePair
    };
    Ok(StructureReport {
        case,
        pair_ranks: (i, j),
        greedy_rank: r,
        shares_with_shortest: best.first.shares_arc_with(shortest) && best.second.shares_arc_with(shortest),
        strictly_better: best.total < game.cumulative,
        ranks_between: 1 < i && i < r && 1 < j && j < r && i != j,
    })
}

/// With a one-arc budget greedy evasion is optimal.
pub fn check_proposition1(truth: &DirectedGraph) -> Result<bool, OracleError> {
    let game = greedy_two_epoch(truth, 1)?;
    let best = brute_force_two_epoch(
        truth,
        &ArcSet::new(),
        1,
        InterdictorKind::SemiOracle,
        OracleLimits::default(),
    )?;
    Ok(best.total == game.cumulative)
}

/// When the budget covers the optimal first path, the optimal second path
/// avoids all of its arcs. Vacuously true otherwise.
pub fn check_remark1(truth: &DirectedGraph, k: usize) -> Result<bool, OracleError> {
    let best = brute_force_two_epoch(
        truth,
        &ArcSet::new(),
        k,
        InterdictorKind::SemiOracle,
        OracleLimits::default(),
    )?;
    Ok(k < best.first.len() || !best.second.shares_arc_with(&best.first))
}

/// Cheapest total cost of two arc-disjoint source-sink paths.
pub fn min_disjoint_pair_cost(truth: &DirectedGraph) -> Option<Cost> {
    let mut net = FlowNetwork::new(truth.node_count());
    for a in truth.arcs() {
        net.add_edge_with_cost(a.tail, a.head, 1, a.cost as i64);
    }
    net.min_cost_flow(truth.source(), truth.sink(), 2).map(|c| c as Cost)
}

/// Random test network with pairwise distinct path costs on which no `k`
/// arcs separate source from sink.
///
/// Node 0 is the source and `n - 1` the sink, `n` uniform in
/// `[5, max_nodes]`; arcs appear independently with probability 0.55 and
/// costs are drawn from `[1, 10^6]`, redrawn until no two paths tie.
pub fn sample_distinct_cost_graph(seed: u64, max_nodes: usize, k: usize) -> DirectedGraph {
    assert!(max_nodes >= 5, "need at least five nodes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(5..=max_nodes);
        let mut pairs = Vec::new();
        for u in 0..n - 1 {
            for v in 1..n {
                if u != v && rng.gen_bool(0.55) {
                    pairs.push((u, v));
                }
            }
        }
        let build = |rng: &mut ChaCha8Rng| {
            let arcs = pairs
                .iter()
                .enumerate()
                .map(|(id, &(tail, head))| Arc {
                    id,
                    tail,
                    head,
                    cost: rng.gen_range(1..=1_000_000),
                    removable: true,
                })
                .collect();
            DirectedGraph::new_unconnected(n, 0, n - 1, arcs).expect("sampled arcs are valid")
        };
        let g = build(&mut rng);
        if !check_not_k_separable(&g, k) {
            continue;
        }
        for _ in 0..20 {
            let g = build(&mut rng);
            match enumerate_paths(&g, &ArcSet::new(), 5_000) {
                Ok(r) if r.distinct_costs => return g,
                Ok(_) => continue,
                Err(_) => break,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, arcs_by_label};

    #[test]
    fn five_node_has_five_paths() {
        let g = fixtures::five_node(6);
        let r = enumerate_paths(&g, &ArcSet::new(), 100).unwrap();
        assert_eq!(r.len(), 5);
        assert!(!r.distinct_costs);
        assert_eq!(g.path_nodes(&r.paths[0]), vec![0, 1, 2, 3]);
        assert_eq!(r.paths[0].cost, 3);
        assert_eq!(r.paths.iter().map(|p| p.cost).collect::<Vec<_>>(), vec![3, 4, 4, 6, 6]);
        assert!(enumerate_paths(&g, &g.all_arcs(), 100).unwrap().is_empty());
        assert_eq!(
            enumerate_paths(&g, &ArcSet::new(), 3).unwrap_err(),
            OracleError::TooManyPaths { cap: 3 }
        );
    }

    #[test]
    fn two_node_graph_has_one_path() {
        let g = fixtures::parallel_chain(2, 4);
        // Two parallel arcs: one path each.
        assert_eq!(enumerate_paths(&g, &[1].into_iter().collect(), 10).unwrap().len(), 1);
    }

    #[test]
    fn example1_brute_force() {
        let g = fixtures::five_node(6);
        let best = brute_force_two_epoch(&g, &ArcSet::new(), 2, InterdictorKind::SemiOracle, OracleLimits::default())
            .unwrap();
        assert_eq!(best.total, 8);
        assert_eq!(g.path_nodes(&best.first), vec![0, 1, 3]);
        assert_eq!(best.second_block, arcs_by_label(&g, &[(1, 2), (2, 4)]));
        assert_eq!(g.path_nodes(&best.second), vec![0, 2, 3]);
    }

    #[test]
    fn example2_two_epochs_cannot_beat_greedy() {
        let g = fixtures::five_node(6);
        let best = brute_force_two_epoch(
            &g,
            &fixtures::example2_a0(&g),
            2,
            InterdictorKind::SemiOracle,
            OracleLimits::default(),
        )
        .unwrap();
        assert_eq!(best.total, 9);
        let consistent = brute_force_two_epoch(
            &g,
            &fixtures::example2_a0(&g),
            2,
            InterdictorKind::Consistent,
            OracleLimits::default(),
        )
        .unwrap();
        assert_eq!(consistent.total, 8);
    }

    #[test]
    fn example3_and_4_brute_force() {
        let g = fixtures::twelve_node();
        let best = brute_force_two_epoch(&g, &ArcSet::new(), 3, InterdictorKind::SemiOracle, OracleLimits::default())
            .unwrap();
        assert_eq!(best.total, 10);
        let g = fixtures::parallel_chain(6, 5);
        let best = brute_force_two_epoch(&g, &ArcSet::new(), 2, InterdictorKind::SemiOracle, OracleLimits::default())
            .unwrap();
        assert_eq!(best.total, 10);
        assert_eq!(min_disjoint_pair_cost(&g), Some(25));
    }

    #[test]
    fn five_node_structure_with_ties() {
        let g = fixtures::five_node(6);
        assert!(check_lemma1(&g, 2, RankingMode::TotalOrder).unwrap());
        assert_eq!(check_lemma1(&g, 2, RankingMode::Strict), Err(OracleError::DistinctCostsViolated));
        let report = check_theorem2(&g, 2, RankingMode::TotalOrder).unwrap();
        assert_eq!(report.case, StructureCase::AlternativePair);
        assert_eq!(report.pair_ranks, (2, 3));
        assert_eq!(report.greedy_rank, 4);
        assert!(report.shares_with_shortest && report.strictly_better && report.ranks_between);
        assert!(check_remark1(&g, 2).unwrap());
    }

    #[test]
    fn sampled_graphs_meet_preconditions() {
        for seed in 0..10 {
            let g = sample_distinct_cost_graph(seed, 8, 2);
            assert!(g.node_count() <= 8);
            assert!(check_not_k_separable(&g, 2));
            assert!(enumerate_paths(&g, &ArcSet::new(), 5_000).unwrap().distinct_costs);
        }
        assert_eq!(sample_distinct_cost_graph(3, 8, 1), sample_distinct_cost_graph(3, 8, 1));
    }

    #[test]
    fn sampled_sweep_small() {
        for seed in 0..15 {
            let g = sample_distinct_cost_graph(seed, 7, 1);
            assert!(check_proposition1(&g).unwrap(), "seed {seed}");
            assert!(check_lemma1(&g, 1, RankingMode::Strict).unwrap(), "seed {seed}");
            let g = sample_distinct_cost_graph(seed, 7, 2);
            assert!(check_theorem2(&g, 2, RankingMode::Strict).unwrap().holds(), "seed {seed}");
            assert!(check_remark1(&g, 2).unwrap(), "seed {seed}");
        }
    }
}
