//! Randomized property sweeps over the oracle checks, shared by the command
//! line and the acceptance tests.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::experiment::derive_seed;
use crate::generators::{reduce_3sat, verify_reduction, SatFormula};
use crate::graph::DirectedGraph;
use crate::oracle::{
    check_lemma1, check_proposition1, check_remark1, check_theorem2, sample_distinct_cost_graph, RankingMode,
    StructureCase,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Theorem2,
    Prop1,
    Remark1,
    Reduction,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lemma1,
        Suite::Theorem2,
        Suite::Prop1,
        Suite::Remark1,
        Suite::Reduction,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Theorem2 => "theorem2",
            Suite::Prop1 => "prop1",
            Suite::Remark1 => "remark1",
            Suite::Reduction => "reduction",
        }
    }

    /// Budgets cycled through the random instance pool.
    pub fn default_budgets(&self) -> &'static [usize] {
        match self {
            Suite::Lemma1 => &[1, 2],
            Suite::Theorem2 | Suite::Remark1 => &[2, 3],
            Suite::Prop1 => &[1],
            Suite::Reduction => &[],
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Result for one instance of a sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub instance: u64,
    pub case: String,
    pub ok: bool,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instance={} case={} ok={}", self.instance, self.case, self.ok)
    }
}

/// Largest node count of sampled test networks.
pub const POOL_MAX_NODES: usize = 8;

/// The `i`-th network of a random pool: its seed, budget and graph.
pub fn pool_instance(seed: u64, budgets: &[usize], i: usize) -> (u64, usize, DirectedGraph) {
    let k = budgets[i % budgets.len()];
    let instance = derive_seed(seed, &[i as u64]);
    (instance, k, sample_distinct_cost_graph(instance, POOL_MAX_NODES, k))
}

/// Runs `count` instances of `suite` on the pool given by `seed` and
/// `budgets` (the suite's defaults when empty). The reduction suite checks
/// the example formula followed by `count` random formulas.
pub fn run_suite(
    suite: Suite,
    count: usize,
    seed: u64,
    budgets: &[usize],
    on_line: &mut dyn FnMut(&CheckLine),
) -> Vec<CheckLine> {
    let budgets = if budgets.is_empty() {
        suite.default_budgets()
    } else {
        budgets
    };
    let mut lines = Vec::new();
    let mut emit = |line: CheckLine| {
        on_line(&line);
        lines.push(line);
    };
    if suite == Suite::Reduction {
        emit(reduction_line(0, &SatFormula::example()));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in 0..count {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(1..=3);
            let formula = SatFormula::random(n, m, &mut rng);
            emit(reduction_line(derive_seed(seed, &[i as u64]), &formula));
        }
        return lines;
    }
    for i in 0..count {
        let (instance, k, g) = pool_instance(seed, budgets, i);
        let line = match suite {
            Suite::Lemma1 => outcome(instance, format!("k{k}"), check_lemma1(&g, k, RankingMode::Strict)),
            Suite::Theorem2 => match check_theorem2(&g, k, RankingMode::Strict) {
                Ok(report) => {
                    let case = match report.case {
                        StructureCase::GreedyOptimal => format!("k{k}-greedy-optimal"),
                        StructureCase::AlternativePair => format!(
                            "k{k}-pair-{}-{}-r{}",
                            report.pair_ranks.0, report.pair_ranks.1, report.greedy_rank
                        ),
                    };
                    CheckLine {
                        instance,
                        case,
                        ok: report.holds(),
                    }
                }
                Err(e) => error_line(instance, e),
            },
            Suite::Prop1 => outcome(instance, format!("k{k}"), check_proposition1(&g)),
            Suite::Remark1 => outcome(instance, format!("k{k}"), check_remark1(&g, k)),
            Suite::Reduction => unreachable!("handled above"),
        };
        emit(line);
    }
    lines
}

fn outcome<E: fmt::Display>(instance: u64, case: String, r: Result<bool, E>) -> CheckLine {
    match r {
        Ok(ok) => CheckLine { instance, case, ok },
        Err(e) => error_line(instance, e),
    }
}

fn error_line(instance: u64, e: impl fmt::Display) -> CheckLine {
    CheckLine {
        instance,
        case: format!("error:{}", e.to_string().replace(' ', "_")),
        ok: false,
    }
}

fn reduction_line(instance: u64, formula: &SatFormula) -> CheckLine {
    let k = 3 * formula.clauses().len();
    let result = reduce_3sat(formula, k, 2).and_then(|inst| Ok((verify_reduction(&inst)?, inst.h)));
    match result {
        Ok((check, h)) => CheckLine {
            instance,
            case: format!(
                "{}-value{}-h{}",
                if check.satisfiable { "sat" } else { "unsat" },
                check.value,
                h
            ),
            ok: check.agrees(h),
        },
        Err(e) => error_line(instance, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_sweeps_pass() {
        for suite in Suite::ALL {
            let lines = run_suite(suite, 5, 3, &[], &mut |_| {});
            assert!(lines.iter().all(|l| l.ok), "{suite}: {lines:?}");
        }
    }
}
