//! End-to-end approximation: prepare, decompose, solve every sub-instance,
//! lift each candidate to the original ids and keep the most profitable.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use num::{BigInt, One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::classes::{check_feasible, solve_subinstance, ClassConfig};
use crate::decompose::{decompose, SubInstance};
use crate::dks::DksChoice;
use crate::error::{QkpError, Result};
use crate::instance::{QkpInstance, Solution};
use crate::preprocess::{prepare, PreparedInstance};
use crate::rational::{ceil_log2, format_rational, int, rational_to_json, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub dks: DksChoice,
    pub knapsack_eps: Rational,
    /// Overrides the backend's declared ratio exponent in the cross-bucket
    /// case split.
    pub alpha_override: Option<Rational>,
    pub replication_cap: usize,
    /// Recorded in the report; the solver itself is deterministic.
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            dks: DksChoice::Greedy,
            knapsack_eps: Rational::new(1.into(), 4.into()),
            alpha_override: None,
            replication_cap: 200_000,
            seed: 0,
        }
    }
}

impl SolveConfig {
    pub fn with_backend(dks: DksChoice) -> Self {
        SolveConfig {
            dks,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.knapsack_eps.is_positive() && self.knapsack_eps < Rational::one()) {
            return Err(QkpError::Input(format!(
                "knapsack eps must lie in (0, 1), got {}",
                self.knapsack_eps
            )));
        }
        if let Some(a) = &self.alpha_override {
            if a.is_negative() || *a >= Rational::one() {
                return Err(QkpError::Input(format!(
                    "alpha must lie in [0, 1), got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// Where a candidate came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    /// Index into [`RunReport::records`].
    Class(usize),
    AlwaysInclude,
    /// Every pruned vertex, offered when they fit together.
    Everything,
    Singleton(usize),
    EdgePair(usize, usize),
}

impl Source {
    pub fn label(&self, report: &RunReport) -> String {
        match self {
            Source::Class(i) => format!("class-{}#{i}", report.records[*i].class),
            Source::AlwaysInclude => "always-include".into(),
            Source::Everything => "everything".into(),
            Source::Singleton(v) => format!("singleton({v})"),
            Source::EdgePair(u, v) => format!("pair({u},{v})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateRecord {
    pub class: u8,
    pub buckets: Option<(usize, usize)>,
    pub profit_level: Option<Rational>,
    pub sub_vertices: usize,
    pub sub_edges: usize,
    pub procedure: &'static str,
    pub fallbacks: Vec<&'static str>,
    /// Original ids, including the always-included vertices.
    pub vertices: Vec<usize>,
    pub cost: Rational,
    pub profit: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub backend: DksChoice,
    pub alpha: Rational,
    pub knapsack_eps: Rational,
    pub seed: u64,
    pub reduced_vertices: usize,
    pub base_profit: Rational,
    pub records: Vec<CandidateRecord>,
    pub fallback_candidates: usize,
    pub chosen: Source,
    pub chosen_profit: Rational,
    pub wall_time: Duration,
}

impl RunReport {
    /// Class tag of the winning candidate, or 0 for the singleton, pair and
    /// always-include backstops.
    pub fn winning_class(&self) -> u8 {
        match self.chosen {
            Source::Class(i) => self.records[i].class,
            _ => 0,
        }
    }

    /// Everything except wall time is deterministic; pass `timing = false`
    /// for byte-stable output.
    pub fn to_json(&self, timing: bool) -> Value {
        let records: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                json!({
                    "class": r.class,
                    "buckets": r.buckets.map(|(i, j)| vec![i, j]),
                    "profit_level": r.profit_level.as_ref().map(format_rational),
                    "sub_vertices": r.sub_vertices,
                    "sub_edges": r.sub_edges,
                    "procedure": r.procedure,
                    "fallbacks": r.fallbacks,
                    "vertices": r.vertices,
                    "cost": rational_to_json(&r.cost),
                    "profit": rational_to_json(&r.profit),
                })
            })
            .collect();
        let mut v = json!({
            "backend": self.backend.to_string(),
            "alpha": format_rational(&self.alpha),
            "knapsack_eps": format_rational(&self.knapsack_eps),
            "seed": self.seed,
            "reduced_vertices": self.reduced_vertices,
            "base_profit": rational_to_json(&self.base_profit),
            "records": records,
            "fallback_candidates": self.fallback_candidates,
            "chosen": self.chosen.label(self),
            "chosen_profit": rational_to_json(&self.chosen_profit),
        });
        if timing {
            v["wall_time_ms"] = json!(self.wall_time.as_secs_f64() * 1e3);
        }
        v
    }
}

/// Exact profit of `S ∪ Z` on the original instance for sets `S` disjoint
/// from the always-included set `Z`, without re-summing `Z` every time.
struct CandidateEvaluator<'a> {
    inst: &'a QkpInstance,
    in_base: Vec<bool>,
    base_profit: Rational,
    /// Vertex profit plus edge profit into `Z`.
    bonus: Vec<Rational>,
}

impl<'a> CandidateEvaluator<'a> {
    fn new(inst: &'a QkpInstance, always: &[usize]) -> Result<Self> {
        let (_, base_profit) = crate::instance::evaluate(inst, always)?;
        let mut in_base = vec![false; inst.n()];
        for &z in always {
            in_base[z] = true;
        }
        let bonus = (0..inst.n())
            .map(|w| {
                let mut b = inst.vertex_profits()[w].clone();
                for &(z, idx) in inst.neighbors(w) {
                    if in_base[z] {
                        b += &inst.edges()[idx].profit;
                    }
                }
                b
            })
            .collect();
        Ok(CandidateEvaluator {
            inst,
            in_base,
            base_profit,
            bonus,
        })
    }

    /// `(cost, profit)` of `extra ∪ Z`; `extra` must be sorted, deduplicated
    /// and disjoint from `Z`.
    fn eval(&self, extra: &[usize]) -> (Rational, Rational) {
        let mut cost = Rational::zero();
        let mut profit = self.base_profit.clone();
        for (pos, &v) in extra.iter().enumerate() {
            debug_assert!(!self.in_base[v]);
            cost += self.inst.cost(v);
            profit += &self.bonus[v];
            for &w in &extra[pos + 1..] {
                if let Some(p) = self.inst.edge_profit(v, w) {
                    profit += p;
                }
            }
        }
        (cost, profit)
    }
}

struct Candidate {
    source: Source,
    vertices: Vec<usize>,
    profit: Rational,
}

/// Higher profit wins; ties go to the lexicographically smaller vertex list.
fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.profit.cmp(&b.profit) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.vertices < b.vertices,
    }
}

/// Run the full pipeline on `inst`. The returned solution is always feasible
/// and never worse than the always-included zero-cost vertices alone.
pub fn solve(inst: &QkpInstance, cfg: &SolveConfig) -> Result<(Solution, RunReport)> {
    cfg.validate()?;
    let started = Instant::now();
    let backend = cfg.dks.backend();
    let alpha = cfg
        .alpha_override
        .clone()
        .unwrap_or_else(|| backend.declared_alpha());
    let class_cfg = ClassConfig {
        knapsack_eps: cfg.knapsack_eps.clone(),
        alpha: alpha.clone(),
        replication_cap: cfg.replication_cap,
    };

    let prep = prepare(inst);
    let subs = decompose(&prep);
    let outcomes: Vec<_> = subs
        .par_iter()
        .map(|sub| {
            let out = solve_subinstance(sub, backend.as_ref(), &class_cfg)?;
            check_feasible(sub, &out)?;
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let evaluator = CandidateEvaluator::new(inst, &prep.always_include)?;
    let mut records = Vec::with_capacity(subs.len());
    let mut best: Option<Candidate> = None;
    let offer = |cand: Candidate, best: &mut Option<Candidate>| {
        if best.as_ref().is_none_or(|b| better(&cand, b)) {
            *best = Some(cand);
        }
    };

    for (i, (sub, out)) in subs.iter().zip(outcomes).enumerate() {
        let reduced = sub.to_reduced(&out.local);
        let extra: Vec<usize> = reduced.iter().map(|&v| prep.orig_of[v]).collect();
        let (cost, profit) = evaluator.eval(&extra);
        if cost > *inst.limit() {
            return Err(QkpError::Internal(format!(
                "class {} candidate costs {cost}, over the limit {}",
                sub.class.tag(),
                inst.limit()
            )));
        }
        let vertices = prep.lift(&reduced);
        records.push(record(sub, &out, vertices.clone(), cost, profit.clone()));
        offer(
            Candidate {
                source: Source::Class(i),
                vertices,
                profit,
            },
            &mut best,
        );
    }

    let mut fallback_candidates = 0;
    for (source, reduced) in backstops(&prep) {
        fallback_candidates += 1;
        let extra: Vec<usize> = reduced.iter().map(|&v| prep.orig_of[v]).collect();
        let (cost, profit) = evaluator.eval(&extra);
        if cost <= *inst.limit() {
            let vertices = prep.lift(&reduced);
            offer(
                Candidate {
                    source,
                    vertices,
                    profit,
                },
                &mut best,
            );
        }
    }

    let best = best.expect("the always-include candidate is always offered");
    let solution = Solution::evaluated(inst, best.vertices.iter().copied())?;
    if solution.total_cost > *inst.limit() || solution.total_profit != best.profit {
        return Err(QkpError::Internal(format!(
            "chosen candidate re-evaluates to cost {} and profit {} (expected profit {})",
            solution.total_cost, solution.total_profit, best.profit
        )));
    }
    let report = RunReport {
        backend: cfg.dks,
        alpha,
        knapsack_eps: cfg.knapsack_eps.clone(),
        seed: cfg.seed,
        reduced_vertices: prep.reduced.n(),
        base_profit: prep.base_profit.clone(),
        records,
        fallback_candidates,
        chosen: best.source,
        chosen_profit: best.profit,
        wall_time: started.elapsed(),
    };
    Ok((solution, report))
}

fn record(
    sub: &SubInstance,
    out: &crate::classes::ClassOutcome,
    vertices: Vec<usize>,
    cost: Rational,
    profit: Rational,
) -> CandidateRecord {
    CandidateRecord {
        class: sub.class.tag(),
        buckets: sub.buckets,
        profit_level: sub.profit_level.clone(),
        sub_vertices: sub.len(),
        sub_edges: sub.edges.len(),
        procedure: out.procedure.as_str(),
        fallbacks: out.fallbacks.clone(),
        vertices,
        cost,
        profit,
    }
}

/// The always-include set alone, the whole pruned instance if it fits, every
/// single vertex and every edge of the pruned instance, as reduced ids.
fn backstops(prep: &PreparedInstance) -> Vec<(Source, Vec<usize>)> {
    let p = &prep.pruned;
    let mut out = vec![(Source::AlwaysInclude, Vec::new())];
    if p.total_cost() <= *p.limit() {
        out.push((Source::Everything, (0..p.n()).collect()));
    }
    for v in 0..p.n() {
        out.push((Source::Singleton(prep.orig_of[v]), vec![v]));
    }
    for e in p.edges() {
        let (u, v) = (prep.orig_of[e.u], prep.orig_of[e.v]);
        out.push((Source::EdgePair(u, v), vec![e.u, e.v]));
    }
    out
}

/// Worst-case ratio floor `1 / (4 * 16 * (2 (ceil(log2 n) + 1)^3 + 1))`
/// for the exact densest-subgraph backend.
pub fn guaranteed_floor(n: usize) -> Rational {
    let lg = ceil_log2(&int(n.max(1) as i64));
    let count = int(2) * num::pow(int(lg + 1), 3) + int(1);
    Rational::new(BigInt::one(), BigInt::one()) / (int(64) * count)
}
