//! Solvers for the five sub-instance classes.
//!
//! Every solver works on local ids of a [`SubInstance`] and returns a vertex
//! set whose scaled cost fits the scaled limit. Inside the edge classes all
//! edges carry the same profit, so objectives are plain edge counts.

use num::{BigInt, One, ToPrimitive, Zero};

use crate::decompose::{SubClass, SubInstance};
use crate::dks::{solve_dks_or_greedy, DksBackend};
use crate::error::{QkpError, Result};
use crate::graph::{top_by_score, Graph};
use crate::instance::QkpInstance;
use crate::knapsack::{knapsack_fptas, knapsack_small_profit, Item};
use crate::rational::{floor_u64, int, to_f64, Rational};

/// Parameters the class solvers need from the solver configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassConfig {
    pub knapsack_eps: Rational,
    /// Ratio exponent α used by the cross-bucket case split.
    pub alpha: Rational,
    /// Largest replicated graph (in vertices) built before degrading to the
    /// top-degree procedure.
    pub replication_cap: usize,
}

impl Default for ClassConfig {
    fn default() -> Self {
        ClassConfig {
            knapsack_eps: Rational::new(1.into(), 4.into()),
            alpha: Rational::zero(),
            replication_cap: 200_000,
        }
    }
}

/// Which procedure produced a class candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Procedure {
    Knapsack,
    TakeAll,
    PeelToFit,
    SmallSubsets,
    Dks,
    EnumerateA,
    EnumerateB,
    TopDegree,
    Replicated,
}

impl Procedure {
    pub fn as_str(self) -> &'static str {
        match self {
            Procedure::Knapsack => "knapsack",
            Procedure::TakeAll => "take-all",
            Procedure::PeelToFit => "peel-to-fit",
            Procedure::SmallSubsets => "small-subsets",
            Procedure::Dks => "dks",
            Procedure::EnumerateA => "enumerate-a",
            Procedure::EnumerateB => "enumerate-b",
            Procedure::TopDegree => "top-degree",
            Procedure::Replicated => "replicated-dks",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassOutcome {
    /// Sorted local ids.
    pub local: Vec<usize>,
    pub procedure: Procedure,
    pub fallbacks: Vec<&'static str>,
}

impl ClassOutcome {
    fn new(mut local: Vec<usize>, procedure: Procedure) -> Self {
        local.sort_unstable();
        local.dedup();
        ClassOutcome {
            local,
            procedure,
            fallbacks: Vec::new(),
        }
    }
}

pub fn solve_subinstance(
    sub: &SubInstance,
    backend: &dyn DksBackend,
    cfg: &ClassConfig,
) -> Result<ClassOutcome> {
    match sub.class {
        SubClass::Knapsack => solve_class1(sub, &cfg.knapsack_eps),
        SubClass::Tail => Ok(solve_class2(sub)),
        SubClass::SameBucket => solve_class3(sub, backend),
        SubClass::TailCross => solve_class4(sub),
        SubClass::CrossBucket => solve_class5(sub, backend, cfg),
    }
}

/// Vertex profits only: a plain knapsack.
pub fn solve_class1(sub: &SubInstance, eps: &Rational) -> Result<ClassOutcome> {
    let items: Vec<Item> = sub
        .scaled_costs
        .iter()
        .zip(&sub.vertex_profits)
        .map(|(c, p)| Item::new(c.clone(), p.clone()))
        .collect();
    let picked = knapsack_fptas(&items, &sub.scaled_limit, eps)?;
    Ok(ClassOutcome::new(picked, Procedure::Knapsack))
}

/// Tail class: every vertex is cheap, so take all of them. If the total
/// still exceeds the limit, peel minimum-degree vertices until it fits.
pub fn solve_class2(sub: &SubInstance) -> ClassOutcome {
    let all: Vec<usize> = (0..sub.len()).collect();
    if sub.is_feasible(&all) {
        return ClassOutcome::new(all, Procedure::TakeAll);
    }
    let g = sub.graph();
    ClassOutcome::new(peel_to_fit(sub, &g, all), Procedure::PeelToFit)
}

/// Same-bucket class: scaled costs lie in `(1, 2]`, so any `floor(c/2)`
/// vertices are feasible and a densest-subgraph call on that many vertices
/// keeps at least a tenth of the optimum.
pub fn solve_class3(sub: &SubInstance, backend: &dyn DksBackend) -> Result<ClassOutcome> {
    let g = sub.graph();
    let t = floor_u64(&(&sub.scaled_limit / int(2))) as usize;
    if t < 2 || sub.len() < 4 {
        return Ok(ClassOutcome::new(
            best_small_subset(sub, &g, 3),
            Procedure::SmallSubsets,
        ));
    }
    let (set, fell_back) = solve_dks_or_greedy(&g, t, backend)?;
    let mut out = ClassOutcome::new(set, Procedure::Dks);
    if fell_back {
        out.fallbacks.push("dks-capacity-greedy");
    }
    Ok(ensure_feasible(sub, &g, out))
}

/// Tail-to-bucket class: part A is the tail, part B has scaled costs in
/// `(d, 2d]`.
pub fn solve_class4(sub: &SubInstance) -> Result<ClassOutcome> {
    let g = sub.graph();
    let a = sub.part_a();
    let b = sub.part_b();
    if a.is_empty() || b.is_empty() {
        return Ok(ClassOutcome::new(Vec::new(), Procedure::TopDegree));
    }
    let d = gap(sub);
    if a.len() < 4 {
        return Ok(ClassOutcome::new(
            enumerate_a_side(sub, &g)?,
            Procedure::EnumerateA,
        ));
    }
    if sub.scaled_limit < &d * int(4) {
        return Ok(ClassOutcome::new(
            enumerate_b_side(sub, &g, 4)?,
            Procedure::EnumerateB,
        ));
    }
    let b_count = count_at_least_one(&(&sub.scaled_limit / (&d * int(4))));
    let b_sel = top_by_score(&b, b_count, |v| g.degree(v));
    let mask = g.membership(&b_sel);
    let a_sel = top_by_score(&a, a.len() / 4, |v| g.degree_into(v, &mask));
    let mut set = a_sel;
    set.extend(b_sel);
    Ok(ensure_feasible(
        sub,
        &g,
        ClassOutcome::new(set, Procedure::TopDegree),
    ))
}

/// Bucket-to-bucket class: part A scaled into `(1, 2]`, part B into
/// `(d, 2d]` with `d >= 2`.
///
/// When A is small relative to the limit, pick the top-degree B vertices and
/// then the top-degree A vertices into them. Otherwise replicate every B
/// vertex `d` times at cost `cost / d`, run the densest-subgraph backend on
/// the replica with `k = floor(c)`, and rank B vertices by the best degree of
/// any of their copies in the returned subgraph.
pub fn solve_class5(
    sub: &SubInstance,
    backend: &dyn DksBackend,
    cfg: &ClassConfig,
) -> Result<ClassOutcome> {
    let g = sub.graph();
    let a = sub.part_a();
    let b = sub.part_b();
    if a.is_empty() || b.is_empty() {
        return Ok(ClassOutcome::new(Vec::new(), Procedure::TopDegree));
    }
    let d = gap(sub);
    if sub.scaled_limit < &d * int(4) {
        return Ok(ClassOutcome::new(
            enumerate_b_side(sub, &g, 4)?,
            Procedure::EnumerateB,
        ));
    }
    if !takes_replication_case(a.len(), &sub.scaled_limit, &cfg.alpha) {
        return Ok(ensure_feasible(sub, &g, class5_top_degree(sub, &g)));
    }
    let d_copies = sub.d_gap.unwrap_or(1) as usize;
    if a.len() + b.len() * d_copies > cfg.replication_cap {
        let mut out = class5_top_degree(sub, &g);
        out.fallbacks.push("replication-cap");
        return Ok(ensure_feasible(sub, &g, out));
    }

    let rep = ReplicatedGraph::build(sub);
    let k = floor_u64(&sub.scaled_limit) as usize;
    let (picked, fell_back) = solve_dks_or_greedy(&rep.graph, k, backend)?;
    let inside = rep.graph.induced_degrees(&picked);
    let a_picked: Vec<usize> = picked.iter().copied().filter(|&v| v < rep.a_len).collect();
    let mut best_copy = vec![0usize; b.len()];
    let mut any_copy = false;
    for &v in picked.iter().filter(|&&v| v >= rep.a_len) {
        let i = rep.base_b_index(v);
        best_copy[i] = best_copy[i].max(inside[v]);
        any_copy = true;
    }
    if a_picked.is_empty() || !any_copy {
        let mut out = class5_top_degree(sub, &g);
        out.fallbacks.push("degenerate-dks-output");
        return Ok(ensure_feasible(sub, &g, out));
    }

    let b_count = count_at_least_one(&(&sub.scaled_limit / (&d * int(4))));
    let b_sel = top_by_score(&b, b_count, |v| best_copy[v - sub.a_len]);
    let mask = g.membership(&b_sel);
    let a_count = count_at_least_one(&(&sub.scaled_limit / int(4)));
    let a_sel = top_by_score(&a_picked, a_count, |v| g.degree_into(v, &mask));
    let mut set = a_sel;
    set.extend(b_sel);
    let mut out = ClassOutcome::new(set, Procedure::Replicated);
    if fell_back {
        out.fallbacks.push("dks-capacity-greedy");
    }
    Ok(ensure_feasible(sub, &g, out))
}

/// True when `|A| > c^((1 + α) / (1 - α))`.
pub fn takes_replication_case(a_len: usize, scaled_limit: &Rational, alpha: &Rational) -> bool {
    if alpha.is_zero() {
        return Rational::from_integer(BigInt::from(a_len)) > *scaled_limit;
    }
    let one = Rational::one();
    let exponent = to_f64(&((&one + alpha) / (&one - alpha)));
    (a_len as f64).ln() > exponent * to_f64(scaled_limit).ln()
}

fn class5_top_degree(sub: &SubInstance, g: &Graph) -> ClassOutcome {
    let d = gap(sub);
    let b_count = count_at_least_one(&(&sub.scaled_limit / (&d * int(4))));
    let b_sel = top_by_score(&sub.part_b(), b_count, |v| g.degree(v));
    let mask = g.membership(&b_sel);
    let a_count = count_at_least_one(&(&sub.scaled_limit / int(4)));
    let a_sel = top_by_score(&sub.part_a(), a_count, |v| g.degree_into(v, &mask));
    let mut set = a_sel;
    set.extend(b_sel);
    ClassOutcome::new(set, Procedure::TopDegree)
}

fn gap(sub: &SubInstance) -> Rational {
    Rational::from_integer(BigInt::from(sub.d_gap.unwrap_or(1)))
}

fn count_at_least_one(x: &Rational) -> usize {
    (floor_u64(x) as usize).max(1)
}

/// Best feasible subset with at most `max_size` vertices by induced edge
/// count; the first one found in lexicographic order wins ties.
fn best_small_subset(sub: &SubInstance, g: &Graph, max_size: usize) -> Vec<usize> {
    fn go(
        sub: &SubInstance,
        g: &Graph,
        start: usize,
        max_size: usize,
        cur: &mut Vec<usize>,
        cost: &Rational,
        best: &mut (usize, Vec<usize>),
    ) {
        let edges = g.induced_edges(cur);
        if edges > best.0 {
            *best = (edges, cur.clone());
        }
        if cur.len() == max_size {
            return;
        }
        for v in start..sub.len() {
            let next = cost + &sub.scaled_costs[v];
            if next <= sub.scaled_limit {
                cur.push(v);
                go(sub, g, v + 1, max_size, cur, &next, best);
                cur.pop();
            }
        }
    }
    let mut best = (0, Vec::new());
    go(
        sub,
        g,
        0,
        max_size,
        &mut Vec::new(),
        &Rational::zero(),
        &mut best,
    );
    best.1
}

/// For every subset of part A, solve an exact knapsack over part B whose
/// item profit is the number of edges into the chosen A vertices.
fn enumerate_a_side(sub: &SubInstance, g: &Graph) -> Result<Vec<usize>> {
    let a = sub.part_a();
    let b = sub.part_b();
    let mut best = (0u64, Vec::new());
    for mask in 1u32..(1 << a.len()) {
        let chosen: Vec<usize> = (0..a.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let cost = sub.scaled_cost_of(&chosen);
        if cost > sub.scaled_limit {
            continue;
        }
        let in_set = g.membership(&chosen);
        let (set, edges) = knapsack_side(sub, g, &b, &in_set, &(&sub.scaled_limit - &cost))?;
        if edges > best.0 {
            let mut s = chosen;
            s.extend(set);
            best = (edges, s);
        }
    }
    Ok(best.1)
}

/// For every affordable subset of part B with at most `max_b` vertices,
/// solve an exact knapsack over part A.
fn enumerate_b_side(sub: &SubInstance, g: &Graph, max_b: usize) -> Result<Vec<usize>> {
    let a = sub.part_a();
    let useful: Vec<usize> = sub
        .part_b()
        .into_iter()
        .filter(|&v| g.degree(v) > 0)
        .collect();
    let mut best = (0u64, Vec::new());
    let mut cur = Vec::new();
    enumerate_b_rec(
        sub,
        g,
        &a,
        &useful,
        0,
        max_b,
        &mut cur,
        &Rational::zero(),
        &mut best,
    )?;
    Ok(best.1)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_b_rec(
    sub: &SubInstance,
    g: &Graph,
    a: &[usize],
    b: &[usize],
    start: usize,
    max_b: usize,
    cur: &mut Vec<usize>,
    cost: &Rational,
    best: &mut (u64, Vec<usize>),
) -> Result<()> {
    if !cur.is_empty() {
        let in_set = g.membership(cur);
        let (set, edges) = knapsack_side(sub, g, a, &in_set, &(&sub.scaled_limit - cost))?;
        if edges > best.0 {
            let mut s = set;
            s.extend(cur.iter().copied());
            *best = (edges, s);
        }
    }
    if cur.len() == max_b {
        return Ok(());
    }
    for i in start..b.len() {
        let next = cost + &sub.scaled_costs[b[i]];
        if next <= sub.scaled_limit {
            cur.push(b[i]);
            enumerate_b_rec(sub, g, a, b, i + 1, max_b, cur, &next, best)?;
            cur.pop();
        }
    }
    Ok(())
}

/// Exact knapsack over `side` where a vertex's profit is its number of
/// neighbors inside `fixed`. Returns the picked vertices and the edge count.
fn knapsack_side(
    sub: &SubInstance,
    g: &Graph,
    side: &[usize],
    fixed: &[bool],
    capacity: &Rational,
) -> Result<(Vec<usize>, u64)> {
    let items: Vec<(usize, u64)> = side
        .iter()
        .map(|&v| (v, g.degree_into(v, fixed) as u64))
        .filter(|&(_, p)| p > 0)
        .collect();
    let costs: Vec<Rational> = items
        .iter()
        .map(|&(v, _)| sub.scaled_costs[v].clone())
        .collect();
    let profits: Vec<u64> = items.iter().map(|&(_, p)| p).collect();
    let picked = knapsack_small_profit(&costs, &profits, capacity)?;
    let edges = picked.iter().map(|&i| profits[i]).sum();
    Ok((picked.into_iter().map(|i| items[i].0).collect(), edges))
}

/// Drop minimum-degree vertices (within the current set, smallest id first)
/// until the set fits the scaled limit.
fn peel_to_fit(sub: &SubInstance, g: &Graph, mut set: Vec<usize>) -> Vec<usize> {
    while !sub.is_feasible(&set) {
        let deg = g.induced_degrees(&set);
        let (pos, _) = set
            .iter()
            .enumerate()
            .min_by_key(|&(_, &v)| (deg[v], v))
            .expect("an infeasible set is non-empty");
        set.remove(pos);
    }
    set
}

fn ensure_feasible(sub: &SubInstance, g: &Graph, mut out: ClassOutcome) -> ClassOutcome {
    if !sub.is_feasible(&out.local) {
        out.local = peel_to_fit(sub, g, std::mem::take(&mut out.local));
        out.fallbacks.push("peel-to-fit");
    }
    out
}

/// Part A plus `d` copies of every part-B vertex, each copy costing
/// `cost(b) / d` and adjacent to exactly the A-neighbors of `b`.
///
/// Vertex layout: A keeps ids `0..a_len`; copy `j` of the `i`-th B vertex
/// has id `a_len + i * d + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicatedGraph {
    pub a_len: usize,
    pub b_len: usize,
    pub d: usize,
    pub graph: Graph,
    pub costs: Vec<Rational>,
    pub scaled_limit: Rational,
}

impl ReplicatedGraph {
    pub fn build(sub: &SubInstance) -> Self {
        let a_len = sub.a_len;
        let b_len = sub.len() - a_len;
        let d = sub.d_gap.unwrap_or(1) as usize;
        let d_q = Rational::from_integer(BigInt::from(d));
        let mut costs: Vec<Rational> = sub.scaled_costs[..a_len].to_vec();
        for i in 0..b_len {
            let c = &sub.scaled_costs[a_len + i] / &d_q;
            costs.extend(std::iter::repeat_n(c, d));
        }
        let edges = sub.edges.iter().flat_map(|&(u, v)| {
            let (a, b) = if u < a_len { (u, v) } else { (v, u) };
            let i = b - a_len;
            (0..d).map(move |j| (a, a_len + i * d + j))
        });
        ReplicatedGraph {
            a_len,
            b_len,
            d,
            graph: Graph::from_edges(a_len + b_len * d, edges),
            costs,
            scaled_limit: sub.scaled_limit.clone(),
        }
    }

    /// Index within part B (0-based) of the original vertex a copy came from.
    pub fn base_b_index(&self, v: usize) -> usize {
        debug_assert!(v >= self.a_len);
        (v - self.a_len) / self.d
    }

    /// Local id in the base sub-instance of replicated vertex `v`.
    pub fn base_of(&self, v: usize) -> usize {
        if v < self.a_len {
            v
        } else {
            self.a_len + self.base_b_index(v)
        }
    }

    /// The replica as a unit-profit instance with the scaled limit.
    pub fn to_instance(&self) -> QkpInstance {
        unit_instance(&self.costs, self.graph.edges(), &self.scaled_limit)
    }
}

/// A sub-instance as a stand-alone instance: scaled costs, unit edge profits
/// (vertex profits for the knapsack class) and the scaled limit.
pub fn sub_to_instance(sub: &SubInstance) -> QkpInstance {
    if sub.class == SubClass::Knapsack {
        return QkpInstance::new(
            sub.scaled_costs.clone(),
            sub.vertex_profits.clone(),
            Vec::new(),
            sub.scaled_limit.clone(),
        )
        .expect("sub-instance data is valid");
    }
    unit_instance(
        &sub.scaled_costs,
        sub.edges.iter().copied(),
        &sub.scaled_limit,
    )
}

fn unit_instance(
    costs: &[Rational],
    edges: impl Iterator<Item = (usize, usize)>,
    limit: &Rational,
) -> QkpInstance {
    QkpInstance::new(
        costs.to_vec(),
        vec![Rational::zero(); costs.len()],
        edges.map(|(u, v)| (u, v, Rational::one())).collect(),
        limit.clone(),
    )
    .expect("sub-instance data is valid")
}

/// Induced edge count of a local set.
pub fn edge_count(sub: &SubInstance, local: &[usize]) -> usize {
    sub.graph().induced_edges(local)
}

pub fn check_feasible(sub: &SubInstance, out: &ClassOutcome) -> Result<()> {
    if sub.is_feasible(&out.local) {
        Ok(())
    } else {
        Err(QkpError::Internal(format!(
            "class {} candidate exceeds its limit ({} > {})",
            sub.class.tag(),
            sub.scaled_cost_of(&out.local),
            sub.scaled_limit
        )))
    }
}

/// Selection size `floor(x)` as `usize`, for callers outside this module.
pub fn floor_count(x: &Rational) -> usize {
    x.floor().to_integer().to_usize().unwrap_or(usize::MAX)
}
