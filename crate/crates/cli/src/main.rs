use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use seqint::arcset::ArcSet;
use seqint::experiment::{derive_seed, run_experiment_with, CellSummary, ExperimentConfig, RowWriter};
use seqint::fixtures;
use seqint::format::{parse_instance, write_instance, Instance};
use seqint::game::{run_game, Feedback, GameConfig};
use seqint::generators::{build_a0, generate, reduce_3sat, verify_reduction, GeneratorConfig, GraphClass, SatFormula};
use seqint::graph::check_not_k_separable;
use seqint::interdiction::InterdictorKind;
use seqint::policies::{EvaderKind, HeuristicParams};
use seqint::suites::{run_suite, Suite};

#[derive(Parser)]
#[command(name = "seqint", version, about = "Sequential shortest-path interdiction with an incomplete-knowledge interdictor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances (or write a built-in preset)
    Gen(GenArgs),
    /// Play one game and print the epoch log
    Run(RunArgs),
    /// Compare strategic and greedy evaders over random instances, as CSV
    Experiment(ExperimentArgs),
    /// Build the network encoding a 3-SAT formula
    Reduce(ReduceArgs),
    /// Run the randomized property checks
    Check(CheckArgs),
    /// Time strategic planning per budget on layered networks
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Layered,
    Uniform,
    Ba,
}

impl ClassArg {
    fn config(self) -> GeneratorConfig {
        let name = match self {
            ClassArg::Layered => "layered",
            ClassArg::Uniform => "uniform",
            ClassArg::Ba => "ba",
        };
        GeneratorConfig::new(GraphClass::by_name(name).expect("known class"))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvaderArg {
    Greedy,
    Strategic,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterdictorArg {
    Consistent,
    SemiOracle,
}

impl From<InterdictorArg> for InterdictorKind {
    fn from(a: InterdictorArg) -> Self {
        match a {
            InterdictorArg::Consistent => InterdictorKind::Consistent,
            InterdictorArg::SemiOracle => InterdictorKind::SemiOracle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FeedbackArg {
    Perfect,
    Noisy,
}

impl From<FeedbackArg> for Feedback {
    fn from(a: FeedbackArg) -> Self {
        match a {
            FeedbackArg::Perfect => Feedback::Perfect,
            FeedbackArg::Noisy => Feedback::DEFAULT_NOISY,
        }
    }
}

#[derive(Args)]
struct Heuristic {
    /// Relative cost threshold for candidate first paths
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Maximum size of the arc subsets removed when generating candidates
    #[arg(long, default_value_t = 2)]
    q: usize,
}

impl Heuristic {
    fn params(&self) -> Result<HeuristicParams> {
        Ok(HeuristicParams::from_alpha(self.alpha, self.q)?)
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "layered", conflicts_with = "preset")]
    class: ClassArg,
    /// Write a built-in example network instead: example1..example4
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Only keep instances without a cut of this many arcs
    #[arg(long)]
    k: Option<usize>,
    /// Output file, or directory when count > 1; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Instance file or preset name (example1..example4)
    #[arg(long)]
    instance: String,
    #[arg(long, value_enum, default_value = "greedy")]
    evader: EvaderArg,
    #[arg(long, value_enum, default_value = "semi-oracle")]
    interdictor: InterdictorArg,
    #[arg(long = "T", default_value_t = 2)]
    horizon: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[command(flatten)]
    heuristic: Heuristic,
    #[arg(long, value_enum, default_value = "perfect")]
    feedback: FeedbackArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Re-plan every epoch instead of following a committed second path
    #[arg(long)]
    replan: bool,
    /// Play even when k arcs can separate source and sink
    #[arg(long)]
    allow_separable: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, value_enum, default_value = "layered")]
    class: ClassArg,
    /// Budgets, e.g. `1-10` or `1,3,5`
    #[arg(long, default_value = "1-10")]
    k: String,
    /// Horizons, e.g. `2,5,10`
    #[arg(long = "T", default_value = "2,5,10")]
    horizons: String,
    /// Instances per repetition
    #[arg(long = "Q", default_value_t = 50)]
    instances: usize,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[command(flatten)]
    heuristic: Heuristic,
    #[arg(long, value_enum, default_value = "perfect")]
    feedback: FeedbackArg,
    #[arg(long, value_enum, default_value = "consistent")]
    interdictor: InterdictorArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write 0 in the timing column so output is byte-reproducible
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct ReduceArgs {
    /// Clauses separated by `;`, literals as signed variable numbers
    #[arg(long, conflicts_with = "file")]
    formula: Option<String>,
    /// File holding the formula
    #[arg(long)]
    file: Option<PathBuf>,
    /// Interdiction budget; defaults to three per clause
    #[arg(long)]
    k: Option<usize>,
    /// Cost of the shadow arcs
    #[arg(long = "M", default_value_t = 2)]
    shadow_cost: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also solve the two-epoch game and compare with satisfiability
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// lemma1, theorem2, prop1, remark1, reduction or all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Budgets to cycle through, e.g. `2,3`; suite defaults when omitted
    #[arg(long)]
    k: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "1-10")]
    k: String,
    #[arg(long = "T", default_value_t = 10)]
    horizon: usize,
    #[arg(long = "Q", default_value_t = 5)]
    instances: usize,
    #[command(flatten)]
    heuristic: Heuristic,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

/// Parses `1-10`, `1,2,5` or a mix such as `1-3,7`.
fn parse_list(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    bail!("empty range `{part}`");
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().with_context(|| format!("bad number `{part}`"))?),
        }
    }
    if out.is_empty() {
        bail!("empty list `{text}`");
    }
    Ok(out)
}

fn preset(name: &str) -> Option<(Instance, &'static str)> {
    let (graph, known, note) = match name {
        "example1" => (fixtures::five_node(6), ArcSet::new(), "five-node network, M=6, empty initial knowledge"),
        "example2" => {
            let g = fixtures::five_node(6);
            let known = fixtures::example2_a0(&g);
            (g, known, "five-node network, M=6, knowledge {(1,3),(2,4),(1,4),(1,5),(5,4)}")
        }
        "example3" => (fixtures::twelve_node(), ArcSet::new(), "twelve-node network, empty initial knowledge"),
        "example4" => (fixtures::parallel_chain(6, 5), ArcSet::new(), "six-node complete network, M=5"),
        _ => return None,
    };
    Some((Instance { graph, known }, note))
}

fn load_instance(spec: &str) -> Result<Instance> {
    if let Some((inst, _)) = preset(spec) {
        return Ok(inst);
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
    parse_instance(&text).with_context(|| format!("parsing {spec}"))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    if let Some(name) = &a.preset {
        let (inst, note) = preset(name).with_context(|| format!("unknown preset `{name}`"))?;
        let text = write_instance(&inst.graph, &inst.known, "a0", &[format!("{name}: {note}")]);
        return write_output(a.out.as_deref(), &text);
    }
    let cfg = a.class.config();
    if a.count > 1 {
        if let Some(dir) = &a.out {
            fs::create_dir_all(dir)?;
        }
    }
    for i in 0..a.count {
        let mut attempt = 0u64;
        let (seed, graph) = loop {
            let seed = derive_seed(a.seed, &[i as u64, attempt]);
            let g = generate(&cfg, seed)?;
            if a.k.map_or(true, |k| check_not_k_separable(&g, k)) {
                break (seed, g);
            }
            attempt += 1;
            if attempt >= 1000 {
                bail!("no instance without a {}-arc cut after 1000 attempts", a.k.unwrap_or(0));
            }
        };
        let known = build_a0(&graph, seed);
        let comments = vec![format!("class={} seed={seed}", cfg.class.name())];
        let text = write_instance(&graph, &known, "a0", &comments);
        match (&a.out, a.count) {
            (Some(dir), n) if n > 1 => {
                let path = dir.join(format!("{}-{i:03}.txt", cfg.class.name()));
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            (out, _) => write_output(out.as_deref(), &text)?,
        }
    }
    Ok(())
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let evader = match a.evader {
        EvaderArg::Greedy => EvaderKind::Greedy,
        EvaderArg::Strategic => EvaderKind::Strategic(a.heuristic.params()?),
    };
    let mut cfg = GameConfig::new(a.horizon, a.k, a.interdictor.into(), evader);
    cfg.feedback = a.feedback.into();
    cfg.seed = a.seed;
    cfg.replan = a.replan;
    cfg.validate_separability = !a.allow_separable;
    let outcome = run_game(&inst.graph, &inst.known, &cfg)?;
    print!("{}", outcome.log());
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::new(a.class.config());
    cfg.ks = parse_list(&a.k)?;
    cfg.horizons = parse_list(&a.horizons)?;
    cfg.instances = a.instances;
    cfg.repetitions = a.reps;
    cfg.params = a.heuristic.params()?;
    cfg.feedback = a.feedback.into();
    cfg.interdictor = a.interdictor.into();
    cfg.seed = a.seed;
    cfg.jobs = a.jobs;

    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout()),
    };
    let mut w = RowWriter::new(sink);
    let no_timing = a.no_timing;
    let summary = run_experiment_with(&cfg, &mut |rows: &[CellSummary]| {
        if no_timing {
            let rows: Vec<CellSummary> = rows
                .iter()
                .map(|r| CellSummary {
                    plan_ms_mean: 0.0,
                    ..r.clone()
                })
                .collect();
            w.write_rows(&rows)
        } else {
            w.write_rows(rows)
        }
    })?;
    eprintln!(
        "cells={} plan_calls={} rejected_instances={}",
        summary.rows.len(),
        summary.plan_calls,
        summary.rejections
    );
    Ok(())
}

fn cmd_reduce(a: ReduceArgs) -> Result<()> {
    let text = match (&a.formula, &a.file) {
        (Some(f), _) => f.clone(),
        (None, Some(p)) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        (None, None) => bail!("give --formula or --file"),
    };
    let formula = SatFormula::parse(&text)?;
    let k = a.k.unwrap_or(3 * formula.clauses().len());
    let inst = reduce_3sat(&formula, k, a.shadow_cost)?;
    let mut comments = inst.describe();
    if a.verify {
        let check = verify_reduction(&inst)?;
        let line = format!(
            "verify satisfiable={} value={} h={} first_block_is_spine={} second_block_on_first_path={} agrees={}",
            check.satisfiable,
            check.value,
            inst.h,
            check.first_block_is_spine,
            check.second_block_on_first_path,
            check.agrees(inst.h)
        );
        eprintln!("{line}");
        comments.push(line);
        if !check.agrees(inst.h) {
            write_output(a.out.as_deref(), &write_instance(&inst.graph, &inst.initial_known, "a0", &comments))?;
            bail!("game value disagrees with satisfiability");
        }
    }
    write_output(
        a.out.as_deref(),
        &write_instance(&inst.graph, &inst.initial_known, "a0", &comments),
    )
}

fn cmd_check(a: CheckArgs) -> Result<bool> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse().map_err(anyhow::Error::msg)?]
    };
    let budgets = match &a.k {
        Some(k) => parse_list(k)?,
        None => Vec::new(),
    };
    let mut all_ok = true;
    let stdout = io::stdout();
    for suite in suites {
        let lines = run_suite(suite, a.count, a.seed, &budgets, &mut |line| {
            let _ = writeln!(stdout.lock(), "suite={suite} {line}");
        });
        let passed = lines.iter().filter(|l| l.ok).count();
        println!("suite={suite} passed={passed}/{}", lines.len());
        for l in lines.iter().filter(|l| !l.ok) {
            eprintln!("suite={suite} failure: {l}");
        }
        all_ok &= passed == lines.len();
    }
    Ok(all_ok)
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::new(ClassArg::Layered.config());
    cfg.ks = parse_list(&a.k)?;
    cfg.horizons = vec![a.horizon];
    cfg.instances = a.instances;
    cfg.repetitions = 1;
    cfg.params = a.heuristic.params()?;
    cfg.seed = a.seed;
    cfg.jobs = a.jobs;
    println!("k,plan_ms_mean");
    run_experiment_with(&cfg, &mut |rows: &[CellSummary]| {
        for r in rows {
            println!("{},{:.3}", r.k, r.plan_ms_mean);
        }
        Ok(())
    })?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Experiment(a) => cmd_experiment(a).map(|_| true),
        Command::Reduce(a) => cmd_reduce(a).map(|_| true),
        Command::Check(a) => cmd_check(a),
        Command::Bench(a) => cmd_bench(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("1-3,7").unwrap(), vec![1, 2, 3, 7]);
        assert_eq!(parse_list(" 2, 5 ,10").unwrap(), vec![2, 5, 10]);
        assert!(parse_list("4-2").is_err());
        assert!(parse_list("").is_err());
        assert!(parse_list("x").is_err());
    }

    #[test]
    fn presets_resolve() {
        for name in ["example1", "example2", "example3", "example4"] {
            assert!(preset(name).is_some());
        }
        assert!(preset("example5").is_none());
        assert_eq!(preset("example2").unwrap().0.known.len(), 5);
    }
}
