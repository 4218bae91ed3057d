//! Split a prepared instance into structured sub-instances.
//!
//! Vertex profits all go to a single knapsack sub-instance. Every rounded
//! edge is assigned by the buckets of its endpoints and its profit level; each
//! occupied (bucket pair, level) cell becomes one sub-instance whose edges
//! all carry the same profit, so only edge counts matter inside it.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use num::One;
use serde_json::{json, Value};

use crate::graph::Graph;
use crate::preprocess::PreparedInstance;
use crate::rational::{floor_log2, format_rational, pow2, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubClass {
    /// All vertices with their vertex profits, no edges.
    Knapsack,
    /// Both endpoints in the tail bucket.
    Tail,
    /// Both endpoints in the same non-tail bucket.
    SameBucket,
    /// One endpoint in the tail, the other in a non-tail bucket.
    TailCross,
    /// Endpoints in two distinct non-tail buckets.
    CrossBucket,
}

impl SubClass {
    pub fn tag(self) -> u8 {
        match self {
            SubClass::Knapsack => 1,
            SubClass::Tail => 2,
            SubClass::SameBucket => 3,
            SubClass::TailCross => 4,
            SubClass::CrossBucket => 5,
        }
    }
}

/// One restricted problem.
///
/// Vertices are addressed by local ids `0..vertices.len()`; `vertices[i]` is
/// the reduced id. For the bipartite classes the first `a_len` local ids form
/// part A and the rest part B; otherwise `a_len == vertices.len()`.
/// `scaled_costs` are the reduced costs divided by `cost_scale`, and
/// `scaled_limit` is the limit divided by the same factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubInstance {
    pub class: SubClass,
    pub vertices: Vec<usize>,
    pub a_len: usize,
    pub scaled_costs: Vec<Rational>,
    /// Only populated for the knapsack class.
    pub vertex_profits: Vec<Rational>,
    /// Local ids, `u < v`.
    pub edges: Vec<(usize, usize)>,
    /// Common rounded edge profit `2^x`.
    pub profit_level: Option<Rational>,
    /// `(i, i)`, `(i, tail)` or `(i, j)` with `i < j`.
    pub buckets: Option<(usize, usize)>,
    pub cost_scale: Rational,
    pub scaled_limit: Rational,
    /// Cost gap `d` between parts A and B.
    pub d_gap: Option<u64>,
}

impl SubInstance {
    /// A single-part sub-instance (tail or same-bucket class) built from local data.
    pub fn single_part(
        class: SubClass,
        scaled_costs: Vec<Rational>,
        edges: Vec<(usize, usize)>,
        scaled_limit: Rational,
    ) -> Self {
        let m = scaled_costs.len();
        SubInstance {
            class,
            vertices: (0..m).collect(),
            a_len: m,
            scaled_costs,
            vertex_profits: Vec::new(),
            edges: normalize(edges),
            profit_level: Some(Rational::one()),
            buckets: None,
            cost_scale: Rational::one(),
            scaled_limit,
            d_gap: None,
        }
    }

    /// A bipartite sub-instance; `edges` are `(a index, b index)` pairs.
    pub fn bipartite(
        class: SubClass,
        a_costs: Vec<Rational>,
        b_costs: Vec<Rational>,
        edges: Vec<(usize, usize)>,
        scaled_limit: Rational,
        d_gap: u64,
    ) -> Self {
        let a_len = a_costs.len();
        let m = a_len + b_costs.len();
        let mut scaled_costs = a_costs;
        scaled_costs.extend(b_costs);
        SubInstance {
            class,
            vertices: (0..m).collect(),
            a_len,
            scaled_costs,
            vertex_profits: Vec::new(),
            edges: normalize(edges.into_iter().map(|(a, b)| (a, a_len + b)).collect()),
            profit_level: Some(Rational::one()),
            buckets: None,
            cost_scale: Rational::one(),
            scaled_limit,
            d_gap: Some(d_gap),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_bipartite(&self) -> bool {
        matches!(self.class, SubClass::TailCross | SubClass::CrossBucket)
    }

    pub fn part_a(&self) -> Vec<usize> {
        (0..self.a_len).collect()
    }

    pub fn part_b(&self) -> Vec<usize> {
        (self.a_len..self.len()).collect()
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.len(), self.edges.iter().copied())
    }

    pub fn scaled_cost_of(&self, set: &[usize]) -> Rational {
        set.iter().map(|&v| &self.scaled_costs[v]).sum()
    }

    pub fn is_feasible(&self, set: &[usize]) -> bool {
        self.scaled_cost_of(set) <= self.scaled_limit
    }

    /// Map local ids to reduced ids.
    pub fn to_reduced(&self, local: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = local.iter().map(|&v| self.vertices[v]).collect();
        out.sort_unstable();
        out
    }

    /// Total edge profit carried by this sub-instance (vertex profits for the
    /// knapsack class).
    pub fn profit_mass(&self) -> Rational {
        match self.class {
            SubClass::Knapsack => self.vertex_profits.iter().sum(),
            _ => {
                let level = self.profit_level.clone().unwrap_or_else(Rational::one);
                level * Rational::from_integer(self.edges.len().into())
            }
        }
    }

    pub fn to_json(&self, prep: &PreparedInstance) -> Value {
        json!({
            "class": self.class.tag(),
            "vertices": self.vertices,
            "original_vertices": self.vertices.iter().map(|&v| prep.orig_of[v]).collect::<Vec<_>>(),
            "part_a_len": self.a_len,
            "edge_count": self.edges.len(),
            "profit_level": self.profit_level.as_ref().map(format_rational),
            "buckets": self.buckets.map(|(i, j)| vec![i, j]),
            "cost_scale": format_rational(&self.cost_scale),
            "scaled_limit": format_rational(&self.scaled_limit),
            "d": self.d_gap,
        })
    }
}

fn normalize(mut edges: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    for e in &mut edges {
        if e.0 > e.1 {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Split `prep` into the knapsack sub-instance followed by one sub-instance
/// per occupied (bucket pair, profit level) cell, ordered by bucket pair and
/// then by descending level.
pub fn decompose(prep: &PreparedInstance) -> Vec<SubInstance> {
    let inst = &prep.reduced;
    let n = inst.n();
    let mut out = vec![SubInstance {
        class: SubClass::Knapsack,
        vertices: (0..n).collect(),
        a_len: n,
        scaled_costs: inst.costs().to_vec(),
        vertex_profits: inst.vertex_profits().to_vec(),
        edges: Vec::new(),
        profit_level: None,
        buckets: None,
        cost_scale: Rational::one(),
        scaled_limit: inst.limit().clone(),
        d_gap: None,
    }];

    // (low bucket, high bucket, descending level) -> reduced edges
    type Cell = (usize, usize, Reverse<i64>);
    let mut cells: BTreeMap<Cell, Vec<(usize, usize)>> = BTreeMap::new();
    for e in inst.edges() {
        let (bu, bv) = (prep.bucket_of(e.u), prep.bucket_of(e.v));
        let (lo, hi) = (bu.min(bv), bu.max(bv));
        cells
            .entry((lo, hi, Reverse(floor_log2(&e.profit))))
            .or_default()
            .push((e.u, e.v));
    }

    let k = prep.k_exp();
    let l = prep.l_buckets();
    let tail = l + 1;
    for ((lo, hi, Reverse(level_exp)), edges) in cells {
        let bucket = |v: usize| prep.bucket_of(v);
        let (class, a_bucket, cost_exp, d_gap) = if lo == tail {
            (SubClass::Tail, tail, 0, None)
        } else if lo == hi {
            (SubClass::SameBucket, lo, k - lo as i64, None)
        } else if hi == tail {
            (
                SubClass::TailCross,
                tail,
                k - l as i64,
                Some(1u64 << (l - lo)),
            )
        } else {
            (
                SubClass::CrossBucket,
                hi,
                k - hi as i64,
                Some(1u64 << (hi - lo)),
            )
        };
        let cost_scale = if class == SubClass::Tail {
            Rational::one()
        } else {
            pow2(cost_exp)
        };

        let mut members: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        members.sort_unstable();
        members.dedup();
        let (mut part_a, part_b): (Vec<usize>, Vec<usize>) = if d_gap.is_some() {
            members.iter().partition(|&&v| bucket(v) == a_bucket)
        } else {
            (members.clone(), Vec::new())
        };
        let a_len = part_a.len();
        part_a.extend(part_b);
        let vertices = part_a;
        let mut local = vec![usize::MAX; n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        out.push(SubInstance {
            class,
            scaled_costs: vertices
                .iter()
                .map(|&v| inst.cost(v) / &cost_scale)
                .collect(),
            a_len,
            vertices,
            vertex_profits: Vec::new(),
            edges: normalize(edges.iter().map(|&(u, v)| (local[u], local[v])).collect()),
            profit_level: Some(pow2(level_exp)),
            buckets: Some((lo, hi)),
            scaled_limit: inst.limit() / &cost_scale,
            cost_scale,
            d_gap,
        });
    }
    out
}

/// `2 (log2 n + 1)^3 + 1`, the bound on the number of sub-instances.
pub fn max_subinstances(n: usize) -> f64 {
    let lg = (n.max(1) as f64).log2();
    2.0 * (lg + 1.0).powi(3) + 1.0
}
