//! Evader decision rules: the greedy policy and the two-step look-ahead
//! heuristic with epoch commitment.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::arcset::ArcSet;
use crate::graph::{shortest_path, Cost, DirectedGraph, Path, PathValue};
use crate::interdiction::{InterdictionError, Interdictor, ObservedView};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolicyError {
    #[error("no source-sink path avoids the blocked arcs {0}; the instance is k-separable")]
    NoPath(ArcSet),
    #[error(transparent)]
    Interdiction(#[from] InterdictionError),
    #[error("invalid heuristic parameters: {0}")]
    InvalidParams(String),
}

/// Look-ahead parameters. `alpha` is held in thousandths so the threshold
/// test stays in integer arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HeuristicParams {
    alpha_permille: u32,
    q: usize,
}

impl HeuristicParams {
    pub fn new(alpha_permille: u32, q: usize) -> Result<Self, PolicyError> {
        if alpha_permille == 0 || alpha_permille > 1000 {
            return Err(PolicyError::InvalidParams(format!(
                "alpha must lie in (0, 1], got {}",
                alpha_permille as f64 / 1000.0
            )));
        }
        if q == 0 {
            return Err(PolicyError::InvalidParams("q must be at least 1".into()));
        }
        Ok(Self { alpha_permille, q })
    }

    /// `alpha` is rounded to the nearest thousandth.
    pub fn from_alpha(alpha: f64, q: usize) -> Result<Self, PolicyError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(PolicyError::InvalidParams(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Self::new(((alpha * 1000.0).round() as u32).max(1), q)
    }

    pub fn alpha_permille(&self) -> u32 {
        self.alpha_permille
    }

    pub fn alpha(&self) -> f64 {
        f64::from(self.alpha_permille) / 1000.0
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `cost < alpha * baseline`.
    fn below_threshold(&self, cost: Cost, baseline: PathValue) -> bool {
        match baseline {
            PathValue::Unreachable => true,
            PathValue::Finite(b) => u128::from(cost) * 1000 < u128::from(self.alpha_permille) * u128::from(b),
        }
    }
}

impl Default for HeuristicParams {
    fn default() -> Self {
        Self {
            alpha_permille: 500,
            q: 2,
        }
    }
}

/// Decisions for the next one or two epochs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlannedDecision {
    pub first: Path,
    /// Absent when the plan is the plain greedy step.
    pub second: Option<Path>,
    pub predicted_total: PathValue,
    /// Predicted two-epoch loss of acting greedily.
    pub baseline: PathValue,
}

pub fn greedy_step(truth: &DirectedGraph, blocked: &ArcSet) -> Result<Path, PolicyError> {
    shortest_path(truth, blocked).ok_or_else(|| PolicyError::NoPath(blocked.clone()))
}

/// Greedy path of the next epoch if the interdictor learns `path`.
fn follow_up(
    truth: &DirectedGraph,
    knowledge: &ObservedView<'_>,
    path: &Path,
    interdictor: &Interdictor,
) -> Result<Option<Path>, PolicyError> {
    let mut next = knowledge.clone();
    next.reveal_nominal(path);
    let predicted = interdictor.decide(&next)?;
    Ok(shortest_path(truth, &predicted.blocked))
}

fn two_epoch_value(first: &Path, second: Option<&Path>) -> PathValue {
    PathValue::Finite(first.cost).saturating_add(PathValue::from(second))
}

/// Two-step look-ahead. The interdictor's next move is predicted with
/// `interdictor` acting on the current knowledge plus the candidate path,
/// unknown arcs entering at nominal cost.
pub fn strategic_plan(
    truth: &DirectedGraph,
    knowledge: &ObservedView<'_>,
    current_blocked: &ArcSet,
    params: &HeuristicParams,
    interdictor: &Interdictor,
) -> Result<PlannedDecision, PolicyError> {
    let greedy = greedy_step(truth, current_blocked)?;
    let greedy_next = follow_up(truth, knowledge, &greedy, interdictor)?;
    let baseline = two_epoch_value(&greedy, greedy_next.as_ref());

    let mut best: Option<(Path, Path, PathValue)> = None;
    let size = params.q.min(greedy.len());
    let mut result = Ok(());
    for_each_position_subset(greedy.len(), size, &mut |positions| {
        if result.is_err() {
            return;
        }
        let mut blocked = current_blocked.clone();
        blocked.extend(positions.iter().map(|&i| greedy.arcs[i]));
        let Some(candidate) = shortest_path(truth, &blocked) else {
            return;
        };
        if !params.below_threshold(candidate.cost, baseline) || !candidate.shares_arc_with(&greedy) {
            return;
        }
        let next = match follow_up(truth, knowledge, &candidate, interdictor) {
            Ok(Some(p)) => p,
            Ok(None) => return,
            Err(e) => {
                result = Err(e);
                return;
            }
        };
        let total = two_epoch_value(&candidate, Some(&next));
        let bar = best.as_ref().map_or(baseline, |b| b.2);
        if total < bar {
            best = Some((candidate, next, total));
        }
    });
    result?;

    Ok(match best {
        Some((first, second, predicted_total)) => PlannedDecision {
            first,
            second: Some(second),
            predicted_total,
            baseline,
        },
        None => PlannedDecision {
            first: greedy,
            second: None,
            predicted_total: baseline,
            baseline,
        },
    })
}

/// Calls `f` with every `size`-subset of `0..n` in lexicographic order.
fn for_each_position_subset(n: usize, size: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(n: usize, start: usize, size: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..=n - (size - cur.len()) {
            cur.push(i);
            rec(n, i + 1, size, cur, f);
            cur.pop();
        }
    }
    if size <= n {
        rec(n, 0, size, &mut Vec::with_capacity(size), f);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvaderKind {
    Greedy,
    Strategic(HeuristicParams),
}

/// What an evader sees before choosing a path.
pub struct EpochContext<'a, 'g> {
    pub truth: &'g DirectedGraph,
    pub knowledge: &'a ObservedView<'g>,
    pub blocked: &'a ArcSet,
    /// 1-based.
    pub epoch: usize,
    pub horizon: usize,
    pub interdictor: &'a Interdictor,
}

/// Outcome of one policy decision, before it is committed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub path: Path,
    pub commitment: Option<Path>,
    /// The previous epoch's commitment was infeasible under the actual block.
    pub fell_back: bool,
    /// Whether a look-ahead plan was computed.
    pub planned: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlanStats {
    pub plan_calls: u64,
    pub plan_time: Duration,
    pub fallbacks: u64,
    pub commitments: u64,
}

/// Per-run evader state.
#[derive(Clone, Debug)]
pub struct EvaderPolicy {
    kind: EvaderKind,
    replan: bool,
    commitment: Option<Path>,
    stats: PlanStats,
}

impl EvaderPolicy {
    /// With `replan`, the strategic evader never commits to a second path
    /// and plans afresh every epoch.
    pub fn new(kind: EvaderKind, replan: bool) -> Self {
        Self {
            kind,
            replan,
            commitment: None,
            stats: PlanStats::default(),
        }
    }

    pub fn kind(&self) -> EvaderKind {
        self.kind
    }

    pub fn stats(&self) -> PlanStats {
        self.stats
    }

    pub fn commitment(&self) -> Option<&Path> {
        self.commitment.as_ref()
    }

    /// The path this policy would take in `ctx`, without changing state.
    pub fn peek(&self, ctx: &EpochContext<'_, '_>) -> Result<Move, PolicyError> {
        let params = match self.kind {
            EvaderKind::Greedy => {
                return Ok(Move {
                    path: greedy_step(ctx.truth, ctx.blocked)?,
                    commitment: None,
                    fell_back: false,
                    planned: false,
                })
            }
            EvaderKind::Strategic(p) => p,
        };
        let mut fell_back = false;
        if let Some(committed) = &self.commitment {
            if committed.avoids(ctx.blocked) {
                return Ok(Move {
                    path: committed.clone(),
                    commitment: None,
                    fell_back: false,
                    planned: false,
                });
            }
            fell_back = true;
        }
        // Nothing left to look ahead to in the last epoch, and a broken
        // commitment falls back to the greedy path.
        if fell_back || ctx.epoch >= ctx.horizon {
            return Ok(Move {
                path: greedy_step(ctx.truth, ctx.blocked)?,
                commitment: None,
                fell_back,
                planned: false,
            });
        }
        let plan = strategic_plan(ctx.truth, ctx.knowledge, ctx.blocked, &params, ctx.interdictor)?;
        Ok(Move {
            path: plan.first,
            commitment: if self.replan { None } else { plan.second },
            fell_back: false,
            planned: true,
        })
    }

    /// Chooses and commits to this epoch's path.
    pub fn step(&mut self, ctx: &EpochContext<'_, '_>) -> Result<Path, PolicyError> {
        let start = Instant::now();
        let mv = self.peek(ctx)?;
        if mv.planned {
            self.stats.plan_calls += 1;
            self.stats.plan_time += start.elapsed();
        }
        if mv.fell_back {
            self.stats.fallbacks += 1;
        }
        if mv.commitment.is_some() {
            self.stats.commitments += 1;
        }
        self.commitment = mv.commitment;
        Ok(mv.path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, arcs_by_label};
    use crate::graph::Arc;
    use crate::interdiction::InterdictorKind;

    fn semi(k: usize) -> Interdictor {
        Interdictor::new(InterdictorKind::SemiOracle, k)
    }

    #[test]
    fn params_validation() {
        assert!(HeuristicParams::from_alpha(0.0, 2).is_err());
        assert!(HeuristicParams::from_alpha(1.5, 2).is_err());
        assert!(HeuristicParams::new(500, 0).is_err());
        let p = HeuristicParams::from_alpha(0.5, 2).unwrap();
        assert_eq!(p, HeuristicParams::default());
        assert!(p.below_threshold(4, PathValue::Finite(9)));
        assert!(!p.below_threshold(5, PathValue::Finite(10)));
    }

    #[test]
    fn greedy_steps_on_five_node() {
        let g = fixtures::five_node(6);
        let p = greedy_step(&g, &ArcSet::new()).unwrap();
        assert_eq!(g.path_nodes(&p), vec![0, 1, 2, 3]);
        assert_eq!(p.cost, 3);
        let p = greedy_step(&g, &arcs_by_label(&g, &[(1, 2), (2, 4)])).unwrap();
        assert_eq!(g.path_nodes(&p), vec![0, 2, 3]);
        assert_eq!(p.cost, 4);
    }

    #[test]
    fn fully_blocked_graph_has_no_path() {
        let arcs = vec![Arc {
            id: 0,
            tail: 0,
            head: 1,
            cost: 1,
            removable: true,
        }];
        let g = DirectedGraph::new(2, 0, 1, arcs).unwrap();
        assert_eq!(greedy_step(&g, &g.all_arcs()), Err(PolicyError::NoPath(g.all_arcs())));
    }

    #[test]
    fn example1_plan_improves_on_greedy() {
        let g = fixtures::five_node(6);
        let view = ObservedView::new(&g, &ArcSet::new());
        let plan = strategic_plan(&g, &view, &ArcSet::new(), &HeuristicParams::default(), &semi(2)).unwrap();
        assert_eq!(plan.baseline, PathValue::Finite(9));
        assert_eq!(plan.predicted_total, PathValue::Finite(8));
        let greedy = greedy_step(&g, &ArcSet::new()).unwrap();
        assert!(plan.first.shares_arc_with(&greedy));
        assert_eq!(plan.first.cost + plan.second.unwrap().cost, 8);
    }

    #[test]
    fn example4_plan_is_greedy() {
        let g = fixtures::parallel_chain(6, 5);
        let view = ObservedView::new(&g, &ArcSet::new());
        let plan = strategic_plan(&g, &view, &ArcSet::new(), &HeuristicParams::default(), &semi(2)).unwrap();
        assert!(plan.second.is_none());
        assert_eq!(plan.first.cost, 0);
        assert_eq!(plan.predicted_total, PathValue::Finite(10));
    }

    #[test]
    fn single_arc_greedy_path_uses_singletons() {
        // s -> f directly at cost 1, or s -> m -> f at cost 1 + 1.
        let arcs = [(0, 2, 1), (0, 1, 1), (1, 2, 1)]
            .iter()
            .enumerate()
            .map(|(id, &(tail, head, cost))| Arc {
                id,
                tail,
                head,
                cost,
                removable: true,
            })
            .collect();
        let g = DirectedGraph::new(3, 0, 2, arcs).unwrap();
        let view = ObservedView::new(&g, &ArcSet::new());
        let params = HeuristicParams::new(1000, 3).unwrap();
        let plan = strategic_plan(&g, &view, &ArcSet::new(), &params, &semi(1)).unwrap();
        // The only candidate avoids the single greedy arc, so it shares
        // nothing with it and is rejected.
        assert!(plan.second.is_none());
        assert_eq!(plan.first.arcs, vec![0]);
    }

    #[test]
    fn position_subsets_are_lexicographic() {
        let mut seen = Vec::new();
        for_each_position_subset(4, 2, &mut |s| seen.push(s.to_vec()));
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut count = 0;
        for_each_position_subset(2, 3, &mut |_| count += 1);
        assert_eq!(count, 0);
    }

    #[test]
    fn final_epoch_is_greedy() {
        let g = fixtures::five_node(6);
        let view = ObservedView::new(&g, &ArcSet::new());
        let interdictor = semi(2);
        let blocked = ArcSet::new();
        let ctx = EpochContext {
            truth: &g,
            knowledge: &view,
            blocked: &blocked,
            epoch: 2,
            horizon: 2,
            interdictor: &interdictor,
        };
        let mut policy = EvaderPolicy::new(EvaderKind::Strategic(HeuristicParams::default()), false);
        assert_eq!(policy.step(&ctx).unwrap().cost, 3);
        assert_eq!(policy.stats().plan_calls, 0);
    }
}
