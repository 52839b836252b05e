//! The greedy-versus-strategic comparison sweep.
//!
//! For every budget `k`, repetition and instance index an instance is drawn
//! (regenerated until no `k` arcs separate source and sink), its initial
//! knowledge built, and both evaders play it with the same seed. Instances
//! do not depend on the horizon, so the greedy game runs once at the
//! longest horizon and shorter horizons read its prefix sums.

use std::io::Write;
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arcset::ArcSet;
use crate::game::{run_game_with, Feedback, GameConfig, GameError};
use crate::generators::{build_a0_with, generate, A0Params, GeneratorConfig, GeneratorError};
use crate::graph::{check_not_k_separable, Cost, DirectedGraph};
use crate::interdiction::{Interdictor, InterdictorKind};
use crate::policies::{EvaderKind, HeuristicParams};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("no instance without a {k}-arc cut after {attempts} attempts")]
    TooManyRejections { k: usize, attempts: usize },
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub generator: GeneratorConfig,
    pub ks: Vec<usize>,
    pub horizons: Vec<usize>,
    /// Instances per repetition.
    pub instances: usize,
    pub repetitions: usize,
    pub feedback: Feedback,
    pub interdictor: InterdictorKind,
    pub params: HeuristicParams,
    pub seed: u64,
    pub a0: A0Params,
    /// Attempts per instance slot before giving up on finding an instance
    /// without a `k`-arc cut.
    pub max_attempts: usize,
    /// Worker threads; 0 uses all cores.
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(generator: GeneratorConfig) -> Self {
        Self {
            generator,
            ks: (1..=10).collect(),
            horizons: vec![2, 5, 10],
            instances: 50,
            repetitions: 10,
            feedback: Feedback::Perfect,
            interdictor: InterdictorKind::Consistent,
            params: HeuristicParams::default(),
            seed: 0,
            a0: A0Params::default(),
            max_attempts: 1000,
            jobs: 0,
        }
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::InvalidConfig(m.into()));
        if self.instances == 0 || self.repetitions == 0 {
            return bad("instances and repetitions must be positive");
        }
        if self.ks.is_empty() || self.ks.contains(&0) {
            return bad("budgets must be positive");
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return bad("horizons must be positive");
        }
        Ok(())
    }
}

/// One `(class, k, T)` row: percentages of instances where the strategic
/// evader did better, the same, or worse than the greedy one, as mean and
/// population standard deviation over repetitions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub class: &'static str,
    pub k: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub feedback: &'static str,
    pub chi_lt_mean: f64,
    pub chi_lt_std: f64,
    pub chi_eq_mean: f64,
    pub chi_eq_std: f64,
    pub chi_gt_mean: f64,
    pub chi_gt_std: f64,
    /// Mean wall-clock time of one look-ahead plan.
    pub plan_ms_mean: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentSummary {
    pub rows: Vec<CellSummary>,
    /// Instances discarded because `k` arcs could separate source and sink.
    pub rejections: u64,
    pub plan_calls: u64,
}

impl ExperimentSummary {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ExperimentError> {
        RowWriter::new(out).write_rows(&self.rows)
    }

    pub fn row(&self, k: usize, horizon: usize) -> Option<&CellSummary> {
        self.rows.iter().find(|r| r.k == k && r.horizon == horizon)
    }
}

/// Streams rows to CSV, flushing after every batch so an aborted sweep
/// leaves the finished budgets on disk.
pub struct RowWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RowWriter<W> {
    pub fn new(out: W) -> Self {
        Self {
            inner: csv::Writer::from_writer(out),
        }
    }

    pub fn write_rows(&mut self, rows: &[CellSummary]) -> Result<(), ExperimentError> {
        for row in rows {
            self.inner.serialize(row)?;
        }
        self.inner.flush()?;
        Ok(())
    }
}

/// Per-instance seed from the sweep coordinates.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(master), |acc, &p| splitmix(acc ^ splitmix(p)))
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A generated instance ready to play.
#[derive(Clone, Debug)]
pub struct SweepInstance {
    pub graph: DirectedGraph,
    pub known: ArcSet,
    pub seed: u64,
    pub rejections: u64,
}

/// Draws the instance for one sweep slot, skipping graphs with a `k`-arc
/// cut.
pub fn draw_instance(
    cfg: &ExperimentConfig,
    k: usize,
    repetition: usize,
    index: usize,
) -> Result<SweepInstance, ExperimentError> {
    for attempt in 0..cfg.max_attempts {
        let seed = derive_seed(cfg.seed, &[k as u64, repetition as u64, index as u64, attempt as u64]);
        let graph = generate(&cfg.generator, seed)?;
        if check_not_k_separable(&graph, k) {
            let known = build_a0_with(&graph, &cfg.a0, splitmix(seed));
            return Ok(SweepInstance {
                graph,
                known,
                seed,
                rejections: attempt as u64,
            });
        }
    }
    Err(ExperimentError::TooManyRejections {
        k,
        attempts: cfg.max_attempts,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    StrategicBetter,
    Equal,
    StrategicWorse,
}

impl Comparison {
    fn of(strategic: Cost, greedy: Cost) -> Self {
        match strategic.cmp(&greedy) {
            std::cmp::Ordering::Less => Comparison::StrategicBetter,
            std::cmp::Ordering::Equal => Comparison::Equal,
            std::cmp::Ordering::Greater => Comparison::StrategicWorse,
        }
    }
}

/// Both evaders' cumulative losses on one instance, per horizon.
#[derive(Clone, Debug)]
pub struct InstanceResult {
    pub greedy: Vec<Cost>,
    pub strategic: Vec<Cost>,
    pub plan_calls: u64,
    pub plan_time: Duration,
    pub rejections: u64,
}

impl InstanceResult {
    pub fn comparison(&self, horizon_index: usize) -> Comparison {
        Comparison::of(self.strategic[horizon_index], self.greedy[horizon_index])
    }
}

pub fn play_instance(
    cfg: &ExperimentConfig,
    k: usize,
    instance: &SweepInstance,
) -> Result<InstanceResult, ExperimentError> {
    let interdictor = Interdictor::new(cfg.interdictor, k);
    let longest = *cfg.horizons.iter().max().expect("validated");
    let game = |horizon, evader| {
        let mut gc = GameConfig::new(horizon, k, cfg.interdictor, evader);
        gc.feedback = cfg.feedback;
        gc.seed = instance.seed;
        // Separability was checked when the instance was drawn.
        gc.validate_separability = false;
        run_game_with(&instance.graph, &instance.known, &gc, &interdictor)
    };
    let greedy = game(longest, EvaderKind::Greedy)?;
    let prefix: Vec<Cost> = greedy
        .records
        .iter()
        .scan(0, |acc, r| {
            *acc += r.loss;
            Some(*acc)
        })
        .collect();

    let mut result = InstanceResult {
        greedy: cfg.horizons.iter().map(|&t| prefix[t - 1]).collect(),
        strategic: Vec::with_capacity(cfg.horizons.len()),
        plan_calls: 0,
        plan_time: Duration::ZERO,
        rejections: instance.rejections,
    };
    for &t in &cfg.horizons {
        let out = game(t, EvaderKind::Strategic(cfg.params))?;
        result.strategic.push(out.cumulative);
        result.plan_calls += out.stats.plan_calls;
        result.plan_time += out.stats.plan_time;
    }
    Ok(result)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs the sweep. `on_rows` receives the rows of each budget as soon as
/// they are complete.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    on_rows: &mut dyn FnMut(&[CellSummary]) -> Result<(), ExperimentError>,
) -> Result<ExperimentSummary, ExperimentError> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;
    let mut summary = ExperimentSummary::default();
    for &k in &cfg.ks {
        let slots: Vec<(usize, usize)> = (0..cfg.repetitions)
            .flat_map(|rep| (0..cfg.instances).map(move |i| (rep, i)))
            .collect();
        let results: Vec<InstanceResult> = pool.install(|| {
            slots
                .par_iter()
                .map(|&(rep, i)| {
                    let instance = draw_instance(cfg, k, rep, i)?;
                    play_instance(cfg, k, &instance)
                })
                .collect::<Result<_, _>>()
        })?;

        let calls: u64 = results.iter().map(|r| r.plan_calls).sum();
        let time: Duration = results.iter().map(|r| r.plan_time).sum();
        summary.plan_calls += calls;
        summary.rejections += results.iter().map(|r| r.rejections).sum::<u64>();
        let plan_ms_mean = if calls == 0 {
            0.0
        } else {
            time.as_secs_f64() * 1000.0 / calls as f64
        };

        let mut rows = Vec::with_capacity(cfg.horizons.len());
        for (h, &horizon) in cfg.horizons.iter().enumerate() {
            let mut pct = [Vec::new(), Vec::new(), Vec::new()];
            for rep in results.chunks(cfg.instances) {
                let mut counts = [0usize; 3];
                for r in rep {
                    counts[r.comparison(h) as usize] += 1;
                }
                for (p, c) in pct.iter_mut().zip(counts) {
                    p.push(100.0 * c as f64 / cfg.instances as f64);
                }
            }
            let [lt, eq, gt] = pct.map(|v| mean_std(&v));
            rows.push(CellSummary {
                class: cfg.generator.class.name(),
                k,
                horizon,
                feedback: cfg.feedback.name(),
                chi_lt_mean: lt.0,
                chi_lt_std: lt.1,
                chi_eq_mean: eq.0,
                chi_eq_std: eq.1,
                chi_gt_mean: gt.0,
                chi_gt_std: gt.1,
                plan_ms_mean,
            });
        }
        on_rows(&rows)?;
        summary.rows.extend(rows);
    }
    Ok(summary)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary, ExperimentError> {
    run_experiment_with(cfg, &mut |_| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::GraphClass;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(GeneratorConfig::new(GraphClass::by_name("layered").unwrap()));
        cfg.ks = vec![1, 2];
        cfg.horizons = vec![2, 5];
        cfg.instances = 4;
        cfg.repetitions = 2;
        cfg.jobs = 1;
        cfg.seed = 17;
        cfg
    }

    #[test]
    fn rows_partition_instances() {
        let summary = run_experiment(&small()).unwrap();
        assert_eq!(summary.rows.len(), 4);
        for row in &summary.rows {
            let total = row.chi_lt_mean + row.chi_eq_mean + row.chi_gt_mean;
            assert!((total - 100.0).abs() < 1e-9);
            if row.horizon == 2 {
                assert_eq!(row.chi_gt_mean, 0.0);
            }
        }
    }

    #[test]
    fn sweep_is_reproducible() {
        let mut cfg = small();
        cfg.feedback = Feedback::DEFAULT_NOISY;
        cfg.ks = vec![2];
        let strip = |s: ExperimentSummary| {
            s.rows
                .into_iter()
                .map(|r| CellSummary { plan_ms_mean: 0.0, ..r })
                .collect::<Vec<_>>()
        };
        let a = strip(run_experiment(&cfg).unwrap());
        cfg.jobs = 2;
        let b = strip(run_experiment(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn csv_schema() {
        let mut cfg = small();
        cfg.ks = vec![1];
        cfg.horizons = vec![2];
        cfg.instances = 1;
        cfg.repetitions = 1;
        let summary = run_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        summary.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "class,k,T,feedback,chi_lt_mean,chi_lt_std,chi_eq_mean,chi_eq_std,chi_gt_mean,chi_gt_std,plan_ms_mean"
        );
        assert!(lines.next().unwrap().starts_with("layered,1,2,perfect,"));
        assert!(lines.next().is_none());
    }

    #[test]
    fn population_std() {
        assert_eq!(mean_std(&[0.0, 100.0]), (50.0, 50.0));
    }

    #[test]
    fn seeds_differ_per_slot() {
        let a = derive_seed(1, &[1, 0, 0, 0]);
        assert_ne!(a, derive_seed(1, &[1, 0, 1, 0]));
        assert_ne!(a, derive_seed(2, &[1, 0, 0, 0]));
        assert_eq!(a, derive_seed(1, &[1, 0, 0, 0]));
    }
}
