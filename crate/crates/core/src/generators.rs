//! Random instance families, the initial-knowledge construction and the
//! 3-SAT gadget network.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arcset::ArcSet;
use crate::graph::{shortest_path_by, Arc, ArcId, Cost, DirectedGraph, GraphError, NodeId, Path};
use crate::interdiction::InterdictorKind;
use crate::oracle::{brute_force_two_epoch, OracleError, OracleLimits, TwoEpochSolution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("no usable instance after {attempts} attempts")]
    DegenerateInstance { attempts: usize },
    #[error("budget {k} outside [{min}, {max}]")]
    BudgetOutOfRange { k: usize, min: usize, max: usize },
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

const MAX_ATTEMPTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphClass {
    Layered { layers: usize, r_min: usize, r_max: usize, p: f64 },
    Uniform { n: usize, p: f64 },
    Ba { n: usize, m: usize, m0: usize },
}

impl GraphClass {
    pub fn name(&self) -> &'static str {
        match self {
            GraphClass::Layered { .. } => "layered",
            GraphClass::Uniform { .. } => "uniform",
            GraphClass::Ba { .. } => "ba",
        }
    }

    /// The standard experiment sizes.
    pub fn by_name(name: &str) -> Option<GraphClass> {
        match name {
            "layered" => Some(GraphClass::Layered {
                layers: 10,
                r_min: 4,
                r_max: 6,
                p: 0.5,
            }),
            "uniform" => Some(GraphClass::Uniform { n: 50, p: 0.5 }),
            "ba" => Some(GraphClass::Ba { n: 50, m: 5, m0: 5 }),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub class: GraphClass,
    /// Arc costs are drawn from `[0, cost_scale]` (per layer gap for layered
    /// networks).
    pub cost_scale: Cost,
}

impl GeneratorConfig {
    pub fn new(class: GraphClass) -> Self {
        Self { class, cost_scale: 100 }
    }

    fn validate(&self) -> Result<(), GeneratorError> {
        let bad = |msg: &str| Err(GeneratorError::InvalidConfig(msg.to_string()));
        let prob_ok = |p: f64| p > 0.0 && p <= 1.0;
        match self.class {
            GraphClass::Layered { layers, r_min, r_max, p } => {
                if layers < 3 {
                    return bad("layered networks need at least 3 layers");
                }
                if r_min == 0 || r_min > r_max {
                    return bad("layer widths need 1 <= r_min <= r_max");
                }
                if !prob_ok(p) {
                    return bad("arc probability must lie in (0, 1]");
                }
            }
            GraphClass::Uniform { n, p } => {
                if n < 2 {
                    return bad("need at least 2 nodes");
                }
                if !prob_ok(p) {
                    return bad("arc probability must lie in (0, 1]");
                }
            }
            GraphClass::Ba { n, m, m0 } => {
                if !(1 <= m && m <= m0 && m0 < n) {
                    return bad("preferential attachment needs 1 <= m <= m0 < n");
                }
            }
        }
        Ok(())
    }
}

pub fn generate(cfg: &GeneratorConfig, seed: u64) -> Result<DirectedGraph, GeneratorError> {
    match cfg.class {
        GraphClass::Layered { .. } => gen_layered(cfg, seed),
        GraphClass::Uniform { .. } => gen_uniform(cfg, seed),
        GraphClass::Ba { .. } => gen_ba(cfg, seed),
    }
}

fn arc(id: ArcId, tail: NodeId, head: NodeId, cost: Cost) -> Arc {
    Arc {
        id,
        tail,
        head,
        cost,
        removable: true,
    }
}

/// Layer 1 holds the source and the last layer the sink. Nodes in layers
/// `i < j` are joined with probability `p / (j - i)` at cost up to
/// `cost_scale * (j - i)`; the source reaches all of layer 2 and all of
/// the next-to-last layer reaches the sink.
pub fn gen_layered(cfg: &GeneratorConfig, seed: u64) -> Result<DirectedGraph, GeneratorError> {
    cfg.validate()?;
    let GraphClass::Layered { layers, r_min, r_max, p } = cfg.class else {
        return Err(GeneratorError::InvalidConfig("expected a layered configuration".into()));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut layer_of = vec![0usize];
        for l in 1..layers - 1 {
            let width = rng.gen_range(r_min..=r_max);
            layer_of.extend(std::iter::repeat(l).take(width));
        }
        layer_of.push(layers - 1);
        let n = layer_of.len();
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let gap = layer_of[v] - layer_of[u];
                if gap == 0 {
                    continue;
                }
                let forced = (u == 0 && layer_of[v] == 1) || (v == n - 1 && layer_of[u] == layers - 2);
                if forced || rng.gen_bool(p / gap as f64) {
                    let cost = rng.gen_range(0..=cfg.cost_scale * gap as Cost);
                    arcs.push(arc(arcs.len(), u, v, cost));
                }
            }
        }
        match DirectedGraph::new(n, 0, n - 1, arcs) {
            Ok(g) => return Ok(g),
            Err(GraphError::Disconnected) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(GeneratorError::DegenerateInstance { attempts: MAX_ATTEMPTS })
}

/// Every ordered pair is an arc with probability `p`, cost in
/// `[0, cost_scale]`; endpoints by [`pick_endpoints`].
pub fn gen_uniform(cfg: &GeneratorConfig, seed: u64) -> Result<DirectedGraph, GeneratorError> {
    cfg.validate()?;
    let GraphClass::Uniform { n, p } = cfg.class else {
        return Err(GeneratorError::InvalidConfig("expected a uniform configuration".into()));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut arcs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(p) {
                    arcs.push(arc(arcs.len(), u, v, rng.gen_range(0..=cfg.cost_scale)));
                }
            }
        }
        if let Some(g) = with_diameter_endpoints(n, arcs, &mut rng)? {
            return Ok(g);
        }
    }
    Err(GeneratorError::DegenerateInstance { attempts: MAX_ATTEMPTS })
}

/// Undirected preferential attachment from an `m0`-clique, each new node
/// linking to `m` distinct nodes chosen proportionally to degree. Every
/// edge becomes two opposite arcs with independent costs.
pub fn gen_ba(cfg: &GeneratorConfig, seed: u64) -> Result<DirectedGraph, GeneratorError> {
    cfg.validate()?;
    let GraphClass::Ba { n, m, m0 } = cfg.class else {
        return Err(GeneratorError::InvalidConfig("expected a preferential attachment configuration".into()));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut edges = Vec::new();
        // Each node appears once per incident edge, so a uniform draw is
        // degree-proportional.
        let mut endpoints = Vec::new();
        for u in 0..m0 {
            for v in u + 1..m0 {
                edges.push((u, v));
                endpoints.extend([u, v]);
            }
        }
        for new in m0..n {
            let mut targets: Vec<NodeId> = Vec::with_capacity(m);
            while targets.len() < m {
                let t = if endpoints.is_empty() {
                    rng.gen_range(0..new)
                } else {
                    endpoints[rng.gen_range(0..endpoints.len())]
                };
                if !targets.contains(&t) {
                    targets.push(t);
                }
            }
            for &t in &targets {
                edges.push((t, new));
                endpoints.extend([t, new]);
            }
        }
        let mut arcs = Vec::with_capacity(2 * edges.len());
        for &(u, v) in &edges {
            arcs.push(arc(arcs.len(), u, v, rng.gen_range(0..=cfg.cost_scale)));
            arcs.push(arc(arcs.len(), v, u, rng.gen_range(0..=cfg.cost_scale)));
        }
        if let Some(g) = with_diameter_endpoints(n, arcs, &mut rng)? {
            return Ok(g);
        }
    }
    Err(GeneratorError::DegenerateInstance { attempts: MAX_ATTEMPTS })
}

fn with_diameter_endpoints(
    n: usize,
    arcs: Vec<Arc>,
    rng: &mut ChaCha8Rng,
) -> Result<Option<DirectedGraph>, GeneratorError> {
    let probe = DirectedGraph::new_unconnected(n, 0, 1, arcs)?;
    let Some((s, f)) = pick_endpoints(&probe, rng) else {
        return Ok(None);
    };
    Ok(Some(probe.with_endpoints(s, f)?))
}

/// Hop distances from `from`; `None` where unreachable.
pub fn hop_distances(g: &DirectedGraph, from: NodeId) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.node_count()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued nodes are reached");
        for &a in g.out_arcs(u) {
            let v = g.arc(a).head;
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Source and sink at hop distance about half the diameter: pairs at exactly
/// `diam / 2` (rounded down), widening by one hop at a time when there are
/// none; one pair drawn uniformly. `None` when no node reaches another.
pub fn pick_endpoints(g: &DirectedGraph, rng: &mut impl Rng) -> Option<(NodeId, NodeId)> {
    let n = g.node_count();
    let mut pairs: Vec<(NodeId, NodeId, usize)> = Vec::new();
    for u in 0..n {
        for (v, d) in hop_distances(g, u).into_iter().enumerate() {
            if let Some(d) = d.filter(|_| u != v) {
                pairs.push((u, v, d));
            }
        }
    }
    let diameter = pairs.iter().map(|p| p.2).max()?;
    let target = diameter / 2;
    for widen in 0..=diameter {
        let chosen: Vec<_> = pairs
            .iter()
            .filter(|p| p.2.abs_diff(target) == widen)
            .collect();
        if let Some(p) = chosen.choose(rng) {
            return Some((p.0, p.1));
        }
    }
    None
}

/// Parameters of the initial-knowledge construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct A0Params {
    pub iterations: usize,
    pub inflate_probability: f64,
    pub inflation: Cost,
}

impl Default for A0Params {
    fn default() -> Self {
        Self {
            iterations: 5,
            inflate_probability: 0.5,
            inflation: 10_000,
        }
    }
}

pub fn build_a0(truth: &DirectedGraph, seed: u64) -> ArcSet {
    build_a0_with(truth, &A0Params::default(), seed)
}

/// Union of shortest paths under independently perturbed costs: in every
/// iteration each arc's cost is raised by `inflation` with the given
/// probability.
pub fn build_a0_with(truth: &DirectedGraph, params: &A0Params, seed: u64) -> ArcSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut known = ArcSet::new();
    for _ in 0..params.iterations {
        let costs: Vec<Cost> = truth
            .arcs()
            .iter()
            .map(|a| {
                if rng.gen_bool(params.inflate_probability) {
                    a.cost + params.inflation
                } else {
                    a.cost
                }
            })
            .collect();
        if let Some(p) = shortest_path_by(truth, |a| costs[a], |_| true) {
            known.extend(p.arcs.iter().copied());
        }
    }
    known
}

// ---------------------------------------------------------------------------
// 3-SAT gadget
// ---------------------------------------------------------------------------

/// A 3-CNF formula. Literal `+i` is variable `i` (1-based), `-i` its
/// negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatFormula {
    variables: usize,
    clauses: Vec<[i32; 3]>,
}

impl SatFormula {
    pub fn new(variables: usize, clauses: Vec<[i32; 3]>) -> Result<Self, GeneratorError> {
        if clauses.is_empty() {
            return Err(GeneratorError::InvalidFormula("no clauses".into()));
        }
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > variables {
                    return Err(GeneratorError::InvalidFormula(format!(
                        "literal {l} outside 1..={variables}"
                    )));
                }
            }
        }
        Ok(Self { variables, clauses })
    }

    /// Whitespace-separated literals, three per clause; `;`, `,`, newlines
    /// and a trailing `0` per clause are accepted as separators.
    pub fn parse(text: &str) -> Result<Self, GeneratorError> {
        let mut clauses = Vec::new();
        for chunk in text.split([';', '\n']) {
            let chunk = chunk.split('#').next().unwrap_or("");
            let lits: Vec<i32> = chunk
                .split([' ', '\t', ','])
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<i32>()
                        .map_err(|_| GeneratorError::InvalidFormula(format!("bad literal `{t}`")))
                })
                .collect::<Result<_, _>>()?;
            let lits: Vec<i32> = lits.into_iter().filter(|&l| l != 0).collect();
            if lits.is_empty() {
                continue;
            }
            let clause: [i32; 3] = lits.as_slice().try_into().map_err(|_| {
                GeneratorError::InvalidFormula(format!("clause `{}` needs exactly 3 literals", chunk.trim()))
            })?;
            clauses.push(clause);
        }
        let variables = clauses.iter().flatten().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        Self::new(variables, clauses)
    }

    /// The three-variable, three-clause example formula
    /// `(x1 | x2 | x3) & (!x1 | !x2 | x3) & (!x1 | x2 | !x3)`.
    pub fn example() -> Self {
        Self::new(3, vec![[1, 2, 3], [-1, -2, 3], [-1, 2, -3]]).expect("valid")
    }

    pub fn random(variables: usize, clauses: usize, rng: &mut impl Rng) -> Self {
        let clauses = (0..clauses)
            .map(|_| {
                std::array::from_fn(|_| {
                    let v = rng.gen_range(1..=variables) as i32;
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
            })
            .collect();
        Self::new(variables, clauses).expect("valid by construction")
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    /// Exhaustive truth-table search.
    pub fn satisfying_assignment(&self) -> Option<Vec<bool>> {
        assert!(self.variables <= 24, "truth table too large");
        (0u32..1 << self.variables)
            .map(|mask| (0..self.variables).map(|i| mask & (1 << i) != 0).collect::<Vec<_>>())
            .find(|a| self.evaluate(a))
    }

    pub fn is_satisfiable(&self) -> bool {
        self.satisfying_assignment().is_some()
    }

    /// Occurrence count of each variable.
    fn occurrences(&self) -> Vec<usize> {
        let mut p = vec![0; self.variables];
        for &l in self.clauses.iter().flatten() {
            p[l.unsigned_abs() as usize - 1] += 1;
        }
        p
    }
}

impl fmt::Display for SatFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{} {} {}", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}

/// One literal occurrence wired into the gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    /// 0-based clause index.
    pub clause: usize,
    /// 1-based variable index.
    pub variable: usize,
    /// 1-based occurrence number of the variable.
    pub q: usize,
    pub positive: bool,
    /// Zero-cost middle arc of the upper side and its shadow, then the same
    /// for the lower side.
    pub lobe_arcs: [ArcId; 4],
    /// Clause entry and exit arcs.
    pub connectors: [ArcId; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionInstance {
    pub formula: SatFormula,
    pub graph: DirectedGraph,
    pub initial_known: ArcSet,
    pub k: usize,
    pub h: Cost,
    pub shadow_cost: Cost,
    /// The removable zero-cost clause chain from source to sink.
    pub spine: ArcSet,
    /// Arcs of the upper (false) and lower (true) side of each variable's
    /// lobe, without shadows.
    pub sides: Vec<[Vec<ArcId>; 2]>,
    pub occurrences: Vec<Occurrence>,
}

impl ReductionInstance {
    /// Comment lines describing the construction, for instance files.
    pub fn describe(&self) -> Vec<String> {
        let mut lines = vec![
            format!("formula {}", self.formula),
            format!("k {}", self.k),
            format!("h {}", self.h),
            format!("shadow_cost {}", self.shadow_cost),
            format!("spine {}", self.spine),
        ];
        for o in &self.occurrences {
            lines.push(format!(
                "occurrence clause={} var={} q={} sign={} lobe={:?} connectors={:?}",
                o.clause + 1,
                o.variable,
                o.q,
                if o.positive { '+' } else { '-' },
                o.lobe_arcs,
                o.connectors
            ));
        }
        lines
    }

    /// First-epoch path taking the lower side of every true variable and the
    /// upper side of every false one, always on removable arcs.
    pub fn assignment_path(&self, assignment: &[bool]) -> Path {
        let arcs: Vec<ArcId> = self
            .sides
            .iter()
            .zip(assignment)
            .flat_map(|(sides, &value)| sides[usize::from(value)].iter().copied())
            .collect();
        self.graph.path(arcs).expect("side chains form a path")
    }
}

struct GadgetBuilder {
    nodes: usize,
    arcs: Vec<Arc>,
}

impl GadgetBuilder {
    fn node(&mut self) -> NodeId {
        self.nodes += 1;
        self.nodes - 1
    }

    fn arc(&mut self, tail: NodeId, head: NodeId, cost: Cost, removable: bool) -> ArcId {
        let id = self.arcs.len();
        self.arcs.push(Arc {
            id,
            tail,
            head,
            cost,
            removable,
        });
        id
    }

    /// Removable arc plus its unremovable parallel shadow.
    fn shadowed(&mut self, tail: NodeId, head: NodeId, cost: Cost, shadow: Cost) -> (ArcId, ArcId) {
        (self.arc(tail, head, cost, true), self.arc(tail, head, shadow, false))
    }
}

/// Builds the two-epoch gadget network for `formula`: one lobe per variable
/// in series between source and sink, a zero-cost removable clause spine,
/// and zero-cost connectors from each clause into the lobe segment of each
/// of its literals.
pub fn reduce_3sat(formula: &SatFormula, k: usize, shadow_cost: Cost) -> Result<ReductionInstance, GeneratorError> {
    let n = formula.variables();
    let m = formula.clauses().len();
    let (min, max) = (3 * m, 6 * m + n);
    if k < min || k > max {
        return Err(GeneratorError::BudgetOutOfRange { k, min, max });
    }
    if shadow_cost < 2 {
        return Err(GeneratorError::InvalidConfig("shadow cost must be at least 2".into()));
    }
    let p = formula.occurrences();
    let mut b = GadgetBuilder {
        nodes: 0,
        arcs: Vec::new(),
    };
    let w: Vec<NodeId> = (0..=n).map(|_| b.node()).collect();
    let (source, sink) = (w[0], w[n]);

    // seg[i][side][q] = (u, v, middle arc, shadow)
    let mut seg: Vec<[Vec<(NodeId, NodeId, ArcId, ArcId)>; 2]> = Vec::with_capacity(n);
    let mut sides = Vec::with_capacity(n);
    let mut known = ArcSet::new();
    for i in 0..n {
        let mut lobe: [Vec<(NodeId, NodeId, ArcId, ArcId)>; 2] = [Vec::new(), Vec::new()];
        let mut chains: [Vec<ArcId>; 2] = [Vec::new(), Vec::new()];
        for side in 0..2 {
            let mut at = w[i];
            for _ in 0..p[i] {
                let u = b.node();
                let v = b.node();
                let (step, step_shadow) = b.shadowed(at, u, 1, shadow_cost);
                let (mid, mid_shadow) = b.shadowed(u, v, 0, shadow_cost);
                chains[side].extend([step, mid]);
                known.extend([step_shadow, mid_shadow]);
                lobe[side].push((u, v, mid, mid_shadow));
                at = v;
            }
            let (last, last_shadow) = b.shadowed(at, w[i + 1], 1, shadow_cost);
            chains[side].push(last);
            known.insert(last_shadow);
        }
        seg.push(lobe);
        sides.push(chains);
    }

    let y: Vec<NodeId> = (0..m).map(|_| b.node()).collect();
    let z: Vec<NodeId> = (0..m).map(|_| b.node()).collect();
    let mut spine = ArcSet::new();
    spine.insert(b.arc(source, y[0], 0, true));
    for j in 0..m - 1 {
        spine.insert(b.arc(z[j], y[j + 1], 0, true));
    }
    spine.insert(b.arc(z[m - 1], sink, 0, true));
    known.union_with(&spine);

    let mut seen = vec![0usize; n];
    let mut occurrences = Vec::with_capacity(3 * m);
    for (j, clause) in formula.clauses().iter().enumerate() {
        for &lit in clause {
            let i = lit.unsigned_abs() as usize - 1;
            let q = seen[i];
            seen[i] += 1;
            let positive = lit > 0;
            // A true literal's evader detour runs on the side the first path
            // leaves untouched: upper for positive, lower for negative.
            let (u, v, _, _) = seg[i][usize::from(!positive)][q];
            let enter = b.arc(y[j], u, 0, true);
            let exit = b.arc(v, z[j], 0, true);
            occurrences.push(Occurrence {
                clause: j,
                variable: i + 1,
                q: q + 1,
                positive,
                lobe_arcs: [seg[i][0][q].2, seg[i][0][q].3, seg[i][1][q].2, seg[i][1][q].3],
                connectors: [enter, exit],
            });
        }
    }

    let graph = DirectedGraph::new(b.nodes, source, sink, b.arcs)?;
    Ok(ReductionInstance {
        formula: formula.clone(),
        graph,
        initial_known: known,
        k,
        h: (3 * m + n) as Cost,
        shadow_cost,
        spine,
        sides,
        occurrences,
    })
}

/// Outcome of checking one gadget against the truth table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCheck {
    pub satisfiable: bool,
    /// Optimal two-epoch loss.
    pub value: Cost,
    pub solution: TwoEpochSolution,
    /// The first block is exactly the spine.
    pub first_block_is_spine: bool,
    /// The second block lies on the first path and avoids the first block.
    pub second_block_on_first_path: bool,
}

impl ReductionCheck {
    /// Value within `h` exactly when satisfiable, and on satisfiable formulas
    /// the blocks have the predicted shape.
    pub fn agrees(&self, h: Cost) -> bool {
        (self.value <= h) == self.satisfiable
            && (!self.satisfiable || (self.first_block_is_spine && self.second_block_on_first_path))
    }
}

pub fn verify_reduction(instance: &ReductionInstance) -> Result<ReductionCheck, GeneratorError> {
    let solution = brute_force_two_epoch(
        &instance.graph,
        &instance.initial_known,
        instance.k,
        InterdictorKind::SemiOracle,
        OracleLimits::default(),
    )?;
    let first_arcs = solution.first.arc_set();
    Ok(ReductionCheck {
        satisfiable: instance.formula.is_satisfiable(),
        value: solution.total,
        first_block_is_spine: solution.first_block == instance.spine,
        second_block_on_first_path: solution.second_block.is_subset(&first_arcs)
            && solution.second_block.is_disjoint(&solution.first_block),
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_not_k_separable, shortest_path};

    fn layered() -> GeneratorConfig {
        GeneratorConfig::new(GraphClass::by_name("layered").unwrap())
    }

    #[test]
    fn layered_shape() {
        for seed in 0..20 {
            let g = gen_layered(&layered(), seed).unwrap();
            assert!((34..=50).contains(&g.node_count()), "{}", g.node_count());
            assert_eq!(g.source(), 0);
            assert_eq!(g.sink(), g.node_count() - 1);
        }
        assert_eq!(gen_layered(&layered(), 5).unwrap(), gen_layered(&layered(), 5).unwrap());
    }

    #[test]
    fn layered_costs_scale_with_gap() {
        // With one-node layers every gap is the difference of node ids.
        let cfg = GeneratorConfig::new(GraphClass::Layered {
            layers: 8,
            r_min: 1,
            r_max: 1,
            p: 1.0,
        });
        let g = gen_layered(&cfg, 3).unwrap();
        assert_eq!(g.node_count(), 8);
        for v in 1..8 {
            assert!(g.find_arc(v - 1, v).is_some());
        }
        for a in g.arcs() {
            assert!(a.cost <= 100 * (a.head - a.tail) as Cost);
        }
    }

    #[test]
    fn uniform_arc_count_and_endpoints() {
        let cfg = GeneratorConfig::new(GraphClass::Uniform { n: 50, p: 0.5 });
        let g = gen_uniform(&cfg, 1).unwrap();
        let sigma = (2450.0f64 * 0.25).sqrt();
        assert!((g.arc_count() as f64 - 1225.0).abs() <= 3.0 * sigma);
        let diam = (0..g.node_count())
            .flat_map(|u| hop_distances(&g, u).into_iter().flatten())
            .max()
            .unwrap();
        let d = hop_distances(&g, g.source())[g.sink()].unwrap();
        assert!(d.abs_diff(diam / 2) <= 1);
    }

    #[test]
    fn complete_triangle() {
        let cfg = GeneratorConfig::new(GraphClass::Uniform { n: 3, p: 1.0 });
        let g = gen_uniform(&cfg, 9).unwrap();
        assert_eq!(g.arc_count(), 6);
        assert_ne!(g.source(), g.sink());
    }

    #[test]
    fn ba_counts_and_degrees() {
        let cfg = GeneratorConfig::new(GraphClass::by_name("ba").unwrap());
        let g = gen_ba(&cfg, 4).unwrap();
        assert_eq!(g.arc_count(), 470);
        for v in 5..50 {
            assert!(g.out_arcs(v).len() >= 5);
        }
    }

    #[test]
    fn ba_degrees_are_heavy_tailed() {
        let cfg = GeneratorConfig::new(GraphClass::Ba { n: 200, m: 5, m0: 5 });
        for seed in 0..20 {
            let g = gen_ba(&cfg, seed).unwrap();
            let degrees: Vec<usize> = (0..200).map(|v| g.out_arcs(v).len()).collect();
            let mean = degrees.iter().sum::<usize>() as f64 / 200.0;
            assert!(*degrees.iter().max().unwrap() as f64 > 2.0 * mean);
        }
    }

    #[test]
    fn config_validation() {
        let bad = [
            GraphClass::Layered {
                layers: 2,
                r_min: 1,
                r_max: 2,
                p: 0.5,
            },
            GraphClass::Uniform { n: 1, p: 0.5 },
            GraphClass::Uniform { n: 5, p: 0.0 },
            GraphClass::Ba { n: 5, m: 6, m0: 5 },
        ];
        for class in bad {
            assert!(matches!(
                generate(&GeneratorConfig::new(class), 0),
                Err(GeneratorError::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn a0_is_union_of_paths() {
        let g = gen_layered(&layered(), 2).unwrap();
        let a0 = build_a0(&g, 2);
        let reach_from_s = hop_distances(&g, g.source());
        for a in a0.iter() {
            assert!(reach_from_s[g.arc(a).tail].is_some());
        }
        let nominal = A0Params {
            inflate_probability: 0.0,
            ..A0Params::default()
        };
        let a0 = build_a0_with(&g, &nominal, 7);
        assert_eq!(a0, shortest_path(&g, &ArcSet::new()).unwrap().arc_set());
    }

    #[test]
    fn formula_parsing_and_truth_table() {
        let f = SatFormula::parse("1 2 3 0\n-1 -2 3 0\n-1 2 -3 0\n").unwrap();
        assert_eq!(f, SatFormula::example());
        assert!(f.is_satisfiable());
        let unsat = SatFormula::parse("1 1 1; -1 -1 -1").unwrap();
        assert!(!unsat.is_satisfiable());
        assert!(SatFormula::parse("1 2").is_err());
        assert!(SatFormula::new(2, vec![[1, 2, 3]]).is_err());
    }

    #[test]
    fn gadget_shape() {
        let inst = reduce_3sat(&SatFormula::example(), 9, 2).unwrap();
        assert_eq!(inst.h, 12);
        assert_eq!(inst.spine.len(), 4);
        for (i, sides) in inst.sides.iter().enumerate() {
            for side in sides {
                assert_eq!(inst.graph.cost_of(side), 3 + 1, "variable {}", i + 1);
                assert_eq!(side.len(), 7);
            }
        }
        let path = inst.assignment_path(&[true, true, true]);
        assert_eq!(path.cost, 12);
        for a in inst.graph.arcs() {
            assert!(a.removable || a.cost == 2);
            assert!(!a.removable || a.cost <= 1);
        }
        assert!(check_not_k_separable(&inst.graph, 9));
        assert!(matches!(
            reduce_3sat(&SatFormula::example(), 8, 2),
            Err(GeneratorError::BudgetOutOfRange { min: 9, max: 21, .. })
        ));
    }

    #[test]
    fn example_gadget_value() {
        let inst = reduce_3sat(&SatFormula::example(), 9, 2).unwrap();
        let check = verify_reduction(&inst).unwrap();
        assert!(check.satisfiable);
        assert_eq!(check.value, 12);
        assert!(check.agrees(inst.h));
    }

    #[test]
    fn small_gadgets() {
        let unsat = SatFormula::parse("1 1 1; -1 -1 -1").unwrap();
        let inst = reduce_3sat(&unsat, 6, 2).unwrap();
        let check = verify_reduction(&inst).unwrap();
        assert!(!check.satisfiable);
        assert!(check.value > inst.h);

        let single = SatFormula::parse("1 2 3").unwrap();
        let inst = reduce_3sat(&single, 3, 2).unwrap();
        let check = verify_reduction(&inst).unwrap();
        assert_eq!(check.value, 6);
        assert!(check.agrees(inst.h));
    }
}
