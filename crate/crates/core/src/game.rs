//! The sequential loop: interdict, evade, feed back.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arcset::ArcSet;
use crate::graph::{check_not_k_separable, Cost, DirectedGraph, GraphError, Path, PathValue};
use crate::interdiction::{
    InterdictionDecision, InterdictionError, Interdictor, InterdictorKind, ObservedView, ResponseModel,
    DEFAULT_ENUMERATION_BOUND,
};
use crate::policies::{EpochContext, EvaderKind, EvaderPolicy, PlanStats, PolicyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("some {k} arcs separate source from sink")]
    NotKSeparable { k: usize },
    #[error("invalid game configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Interdiction(#[from] InterdictionError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Feedback {
    Perfect,
    /// Observations uniform on `[c (1 - w), c (1 + w)]` with `w` given in
    /// thousandths.
    Noisy { width_permille: u32 },
}

impl Feedback {
    pub const DEFAULT_NOISY: Feedback = Feedback::Noisy { width_permille: 200 };

    pub fn name(&self) -> &'static str {
        match self {
            Feedback::Perfect => "perfect",
            Feedback::Noisy { .. } => "noisy",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameConfig {
    pub horizon: usize,
    pub budget: usize,
    pub feedback: Feedback,
    pub interdictor: InterdictorKind,
    pub evader: EvaderKind,
    pub seed: u64,
    pub enumeration_bound: u64,
    /// Strategic evader plans afresh every epoch instead of committing.
    pub replan: bool,
    /// Reject instances where `budget` arcs can separate source and sink.
    pub validate_separability: bool,
}

impl GameConfig {
    pub fn new(horizon: usize, budget: usize, interdictor: InterdictorKind, evader: EvaderKind) -> Self {
        Self {
            horizon,
            budget,
            feedback: Feedback::Perfect,
            interdictor,
            evader,
            seed: 0,
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
            replan: false,
            validate_separability: true,
        }
    }

    fn validate(&self) -> Result<(), GameError> {
        if self.horizon == 0 {
            return Err(GameError::InvalidConfig("horizon must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(GameError::InvalidConfig("budget must be at least 1".into()));
        }
        if let Feedback::Noisy { width_permille } = self.feedback {
            if width_permille >= 1000 {
                return Err(GameError::InvalidConfig("noise width must be below 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpochRecord {
    pub t: usize,
    pub blocked: ArcSet,
    pub traversed: Path,
    /// True cost of the traversed path.
    pub loss: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameOutcome<'g> {
    pub records: Vec<EpochRecord>,
    pub cumulative: Cost,
    pub final_knowledge: ObservedView<'g>,
    pub stats: PlanStats,
}

impl GameOutcome<'_> {
    /// One `t=.. I={..} P={..} loss=..` line per epoch and an `L=..` trailer.
    pub fn log(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(
                out,
                "t={} I={} P={} loss={}",
                r.t,
                r.blocked,
                r.traversed.arc_set(),
                r.loss
            );
        }
        let _ = writeln!(out, "L={}", self.cumulative);
        out
    }

    pub fn losses(&self) -> Vec<Cost> {
        self.records.iter().map(|r| r.loss).collect()
    }
}

/// Observation noise for one run, drawn up front per arc so the greedy and
/// strategic runs of an instance see the same draws.
#[derive(Clone, Debug)]
pub struct NoiseTable {
    observed: Option<Vec<Cost>>,
}

impl NoiseTable {
    pub fn new(truth: &DirectedGraph, feedback: Feedback, seed: u64) -> Self {
        let observed = match feedback {
            Feedback::Perfect => None,
            Feedback::Noisy { width_permille } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let w = u128::from(width_permille);
                Some(
                    truth
                        .arcs()
                        .iter()
                        .map(|a| {
                            let c = u128::from(a.cost);
                            let lo = (c * (1000 - w)).div_ceil(1000);
                            let hi = c * (1000 + w) / 1000;
                            rng.gen_range(lo..=hi) as Cost
                        })
                        .collect(),
                )
            }
        };
        Self { observed }
    }

    pub fn observation(&self, truth: &DirectedGraph, arc: usize) -> Cost {
        match &self.observed {
            None => truth.arc(arc).cost,
            Some(v) => v[arc],
        }
    }
}

/// Adds the arcs of `path` to the interdictor's knowledge. Arcs seen before
/// keep their first observation.
pub fn apply_feedback(knowledge: &mut ObservedView<'_>, path: &Path, noise: &NoiseTable) {
    let truth = knowledge.graph();
    for &a in &path.arcs {
        knowledge.reveal(a, noise.observation(truth, a));
    }
}

/// Semi-oracle response to the actual evader: the loss of the path the
/// evader would take this epoch under a candidate block.
struct PolicyResponse<'a, 'g> {
    policy: &'a EvaderPolicy,
    truth: &'g DirectedGraph,
    knowledge: &'a ObservedView<'g>,
    epoch: usize,
    horizon: usize,
    interdictor: &'a Interdictor,
}

impl ResponseModel for PolicyResponse<'_, '_> {
    fn loss(&mut self, blocked: &ArcSet) -> Result<PathValue, InterdictionError> {
        let ctx = EpochContext {
            truth: self.truth,
            knowledge: self.knowledge,
            blocked,
            epoch: self.epoch,
            horizon: self.horizon,
            interdictor: self.interdictor,
        };
        match self.policy.peek(&ctx) {
            Ok(mv) => Ok(PathValue::Finite(mv.path.cost)),
            Err(PolicyError::NoPath(_)) => Ok(PathValue::Unreachable),
            Err(PolicyError::Interdiction(e)) => Err(e),
            Err(PolicyError::InvalidParams(_)) => unreachable!("parameters are validated at construction"),
        }
    }
}

pub fn run_game<'g>(
    truth: &'g DirectedGraph,
    initial_known: &ArcSet,
    config: &GameConfig,
) -> Result<GameOutcome<'g>, GameError> {
    let interdictor = Interdictor::with_bound(config.interdictor, config.budget, config.enumeration_bound);
    run_game_with(truth, initial_known, config, &interdictor)
}

/// As [`run_game`], reusing `interdictor` and its memoized decisions. The
/// interdictor's kind and budget take precedence over `config`.
pub fn run_game_with<'g>(
    truth: &'g DirectedGraph,
    initial_known: &ArcSet,
    config: &GameConfig,
    interdictor: &Interdictor,
) -> Result<GameOutcome<'g>, GameError> {
    config.validate()?;
    if let Some(bad) = initial_known.iter().find(|&a| a >= truth.arc_count()) {
        return Err(GraphError::InvalidArcId(bad).into());
    }
    if config.validate_separability && !check_not_k_separable(truth, interdictor.budget()) {
        return Err(GameError::NotKSeparable {
            k: interdictor.budget(),
        });
    }

    let noise = NoiseTable::new(truth, config.feedback, config.seed);
    let mut knowledge = ObservedView::new(truth, initial_known);
    let mut policy = EvaderPolicy::new(config.evader, config.replan);
    let mut records = Vec::with_capacity(config.horizon);
    let mut cumulative: Cost = 0;

    for t in 1..=config.horizon {
        let decision = interdict(interdictor, &policy, truth, &knowledge, t, config.horizon)?;
        let ctx = EpochContext {
            truth,
            knowledge: &knowledge,
            blocked: &decision.blocked,
            epoch: t,
            horizon: config.horizon,
            interdictor,
        };
        let path = policy.step(&ctx)?;
        debug_assert!(path.avoids(&decision.blocked));
        apply_feedback(&mut knowledge, &path, &noise);
        cumulative += path.cost;
        records.push(EpochRecord {
            t,
            blocked: decision.blocked,
            loss: path.cost,
            traversed: path,
        });
    }

    Ok(GameOutcome {
        records,
        cumulative,
        final_knowledge: knowledge,
        stats: policy.stats(),
    })
}

fn interdict(
    interdictor: &Interdictor,
    policy: &EvaderPolicy,
    truth: &DirectedGraph,
    knowledge: &ObservedView<'_>,
    epoch: usize,
    horizon: usize,
) -> Result<InterdictionDecision, InterdictionError> {
    match (interdictor.kind(), policy.kind()) {
        (InterdictorKind::SemiOracle, EvaderKind::Strategic(_)) => interdictor.decide_against(
            knowledge,
            &mut PolicyResponse {
                policy,
                truth,
                knowledge,
                epoch,
                horizon,
                interdictor,
            },
        ),
        _ => interdictor.decide(knowledge),
    }
}
