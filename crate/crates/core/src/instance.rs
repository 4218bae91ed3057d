//! Problem data model: instances, solutions, evaluation and validation.

use std::collections::BTreeSet;
use std::fmt;

use num::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{QkpError, Result};
use crate::rational::{is_negative, rational_to_json, JsonRational, Rational};

/// An undirected edge `(u, v, profit)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub profit: Rational,
}

/// A validated quadratic knapsack instance.
///
/// Vertex ids are dense `0..n`. Edges are kept sorted by `(u, v)` with
/// `u < v`; the adjacency lists are sorted by neighbor id and carry the
/// index of the edge in [`QkpInstance::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QkpInstance {
    costs: Vec<Rational>,
    vertex_profits: Vec<Rational>,
    edges: Vec<Edge>,
    limit: Rational,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl QkpInstance {
    /// Build an instance, normalizing edge orientation and rejecting any
    /// invariant violation.
    pub fn new(
        costs: Vec<Rational>,
        vertex_profits: Vec<Rational>,
        edges: Vec<(usize, usize, Rational)>,
        limit: Rational,
    ) -> Result<Self> {
        let doc = InstanceDoc {
            n: costs.len(),
            limit: JsonRational(limit),
            costs: costs.into_iter().map(JsonRational).collect(),
            vertex_profits: vertex_profits.into_iter().map(JsonRational).collect(),
            edges: edges
                .into_iter()
                .map(|(u, v, p)| (u as i64, v as i64, JsonRational(p)))
                .collect(),
        };
        Self::from_doc(doc)
    }

    pub fn from_doc(doc: InstanceDoc) -> Result<Self> {
        let violations = validate(&doc);
        if !violations.is_empty() {
            return Err(QkpError::Invalid(violations));
        }
        let n = doc.n;
        let mut edges: Vec<Edge> = doc
            .edges
            .into_iter()
            .map(|(a, b, p)| {
                let (a, b) = (a as usize, b as usize);
                Edge {
                    u: a.min(b),
                    v: a.max(b),
                    profit: p.0,
                }
            })
            .collect();
        edges.sort_by_key(|e| (e.u, e.v));
        let mut adjacency = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, idx));
            adjacency[e.v].push((e.u, idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(QkpInstance {
            costs: doc.costs.into_iter().map(|c| c.0).collect(),
            vertex_profits: doc.vertex_profits.into_iter().map(|p| p.0).collect(),
            edges,
            limit: doc.limit.0,
            adjacency,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        Self::from_doc(doc)
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn costs(&self) -> &[Rational] {
        &self.costs
    }

    pub fn cost(&self, v: usize) -> &Rational {
        &self.costs[v]
    }

    pub fn vertex_profits(&self) -> &[Rational] {
        &self.vertex_profits
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn limit(&self) -> &Rational {
        &self.limit
    }

    /// `(neighbor, edge index)` pairs, sorted by neighbor.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edge_profit(&self, u: usize, v: usize) -> Option<&Rational> {
        let list = &self.adjacency[u];
        list.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|pos| &self.edges[list[pos].1].profit)
    }

    pub fn total_cost(&self) -> Rational {
        self.costs.iter().sum()
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            n: self.n(),
            limit: JsonRational(self.limit.clone()),
            costs: self.costs.iter().cloned().map(JsonRational).collect(),
            vertex_profits: self
                .vertex_profits
                .iter()
                .cloned()
                .map(JsonRational)
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.u as i64, e.v as i64, JsonRational(e.profit.clone())))
                .collect(),
        }
    }

    /// Canonical JSON: sorted keys, two-space indentation, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let value = json!({
            "n": self.n(),
            "limit": rational_to_json(&self.limit),
            "costs": self.costs.iter().map(rational_to_json).collect::<Vec<_>>(),
            "vertex_profits": self.vertex_profits.iter().map(rational_to_json).collect::<Vec<_>>(),
            "edges": self.edges.iter()
                .map(|e| json!([e.u, e.v, rational_to_json(&e.profit)]))
                .collect::<Vec<_>>(),
        });
        let mut s = serde_json::to_string_pretty(&value).expect("json values always serialize");
        s.push('\n');
        s
    }

    fn check_ids(&self, set: &[usize]) -> Result<()> {
        match set.iter().find(|&&v| v >= self.n()) {
            Some(v) => Err(QkpError::Input(format!(
                "vertex id {v} out of range for instance with {} vertices",
                self.n()
            ))),
            None => Ok(()),
        }
    }
}

/// Total cost and total profit of the subgraph induced by `set`.
///
/// Duplicate ids in `set` are counted once.
pub fn evaluate(inst: &QkpInstance, set: &[usize]) -> Result<(Rational, Rational)> {
    inst.check_ids(set)?;
    let mut member = vec![false; inst.n()];
    let mut cost = Rational::zero();
    let mut profit = Rational::zero();
    for &v in set {
        if member[v] {
            continue;
        }
        member[v] = true;
        cost += &inst.costs[v];
        profit += &inst.vertex_profits[v];
    }
    for (v, _) in member.iter().enumerate().filter(|(_, &m)| m) {
        for &(w, idx) in &inst.adjacency[v] {
            if w > v && member[w] {
                profit += &inst.edges[idx].profit;
            }
        }
    }
    Ok((cost, profit))
}

pub fn is_feasible(inst: &QkpInstance, set: &[usize]) -> Result<bool> {
    let (cost, _) = evaluate(inst, set)?;
    Ok(cost <= inst.limit)
}

/// A vertex subset together with its evaluated cost and profit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub vertices: Vec<usize>,
    pub total_cost: Rational,
    pub total_profit: Rational,
}

impl Solution {
    /// Evaluate `vertices` on `inst`. The vertex list is sorted and deduplicated.
    pub fn evaluated(
        inst: &QkpInstance,
        vertices: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let vertices: Vec<usize> = vertices
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let (total_cost, total_profit) = evaluate(inst, &vertices)?;
        Ok(Solution {
            vertices,
            total_cost,
            total_profit,
        })
    }

    pub fn to_canonical_json(&self) -> String {
        let value = json!({
            "vertices": self.vertices,
            "cost": rational_to_json(&self.total_cost),
            "profit": rational_to_json(&self.total_profit),
        });
        let mut s = serde_json::to_string_pretty(&value).expect("json values always serialize");
        s.push('\n');
        s
    }
}

/// Solution file as written by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub vertices: Vec<usize>,
    pub cost: JsonRational,
    pub profit: JsonRational,
}

/// Unvalidated JSON instance document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub n: usize,
    pub limit: JsonRational,
    pub costs: Vec<JsonRational>,
    pub vertex_profits: Vec<JsonRational>,
    pub edges: Vec<(i64, i64, JsonRational)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    LengthMismatch {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    NegativeCost {
        vertex: usize,
    },
    NegativeVertexProfit {
        vertex: usize,
    },
    NegativeEdgeProfit {
        u: i64,
        v: i64,
    },
    NegativeLimit,
    SelfLoop {
        vertex: i64,
    },
    DuplicateEdge {
        u: i64,
        v: i64,
    },
    VertexOutOfRange {
        id: i64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch {
                field,
                expected,
                found,
            } => {
                write!(
                    f,
                    "length mismatch: {field} has {found} entries, expected {expected}"
                )
            }
            Violation::NegativeCost { vertex } => write!(f, "negative cost at vertex {vertex}"),
            Violation::NegativeVertexProfit { vertex } => {
                write!(f, "negative vertex profit at vertex {vertex}")
            }
            Violation::NegativeEdgeProfit { u, v } => {
                write!(f, "negative edge profit on ({u}, {v})")
            }
            Violation::NegativeLimit => write!(f, "negative limit"),
            Violation::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Violation::DuplicateEdge { u, v } => write!(f, "duplicate edge ({u}, {v})"),
            Violation::VertexOutOfRange { id } => write!(f, "vertex id {id} out of range"),
        }
    }
}

/// Report every invariant violation in `doc`. An empty list means the
/// document describes a valid instance.
pub fn validate(doc: &InstanceDoc) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = doc.n;
    if doc.costs.len() != n {
        out.push(Violation::LengthMismatch {
            field: "costs",
            expected: n,
            found: doc.costs.len(),
        });
    }
    if doc.vertex_profits.len() != n {
        out.push(Violation::LengthMismatch {
            field: "vertex_profits",
            expected: n,
            found: doc.vertex_profits.len(),
        });
    }
    for (i, c) in doc.costs.iter().enumerate() {
        if is_negative(&c.0) {
            out.push(Violation::NegativeCost { vertex: i });
        }
    }
    for (i, p) in doc.vertex_profits.iter().enumerate() {
        if is_negative(&p.0) {
            out.push(Violation::NegativeVertexProfit { vertex: i });
        }
    }
    if is_negative(&doc.limit.0) {
        out.push(Violation::NegativeLimit);
    }
    let mut seen = BTreeSet::new();
    for (u, v, p) in &doc.edges {
        let (u, v) = (*u, *v);
        let mut in_range = true;
        for id in [u, v] {
            if id < 0 || id as usize >= n {
                out.push(Violation::VertexOutOfRange { id });
                in_range = false;
            }
        }
        if u == v {
            out.push(Violation::SelfLoop { vertex: u });
        } else if in_range && !seen.insert((u.min(v), u.max(v))) {
            out.push(Violation::DuplicateEdge {
                u: u.min(v),
                v: u.max(v),
            });
        }
        if is_negative(&p.0) {
            out.push(Violation::NegativeEdgeProfit { u, v });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn triangle() -> QkpInstance {
        QkpInstance::new(
            ints(&[1, 1, 1]),
            ints(&[0, 0, 0]),
            vec![(0, 1, int(1)), (1, 2, int(1)), (0, 2, int(1))],
            int(2),
        )
        .unwrap()
    }

    #[test]
    fn evaluate_full_triangle() {
        let t = triangle();
        assert_eq!(evaluate(&t, &[0, 1, 2]).unwrap(), (int(3), int(3)));
        assert_eq!(evaluate(&t, &[]).unwrap(), (int(0), int(0)));
    }

    #[test]
    fn evaluate_path_prefix() {
        let p = QkpInstance::new(
            ints(&[1, 1, 1]),
            ints(&[2, 0, 0]),
            vec![(0, 1, int(1)), (1, 2, int(1))],
            int(3),
        )
        .unwrap();
        assert_eq!(evaluate(&p, &[0, 1]).unwrap(), (int(2), int(3)));
    }

    #[test]
    fn evaluate_rejects_bad_id() {
        assert!(matches!(
            evaluate(&triangle(), &[3]),
            Err(QkpError::Input(_))
        ));
        assert!(is_feasible(&triangle(), &[7]).is_err());
    }

    #[test]
    fn feasibility_boundaries() {
        let two = QkpInstance::new(ints(&[1, 1]), ints(&[0, 0]), vec![], int(2)).unwrap();
        assert!(is_feasible(&two, &[0, 1]).unwrap());
        let heavy = QkpInstance::new(ints(&[3, 3]), ints(&[0, 0]), vec![], int(5)).unwrap();
        assert!(!is_feasible(&heavy, &[0, 1]).unwrap());
        let zero = QkpInstance::new(ints(&[3]), ints(&[0]), vec![], int(0)).unwrap();
        assert!(is_feasible(&zero, &[]).unwrap());
    }

    #[test]
    fn validate_reports_violations() {
        let ok = triangle().to_doc();
        assert!(validate(&ok).is_empty());

        let mut looped = triangle().to_doc();
        looped.edges.push((2, 2, JsonRational(int(5))));
        let v = validate(&looped);
        assert_eq!(v, vec![Violation::SelfLoop { vertex: 2 }]);
        assert!(v[0].to_string().contains("self-loop"));

        let mut neg = triangle().to_doc();
        neg.costs[1] = JsonRational(int(-1));
        let v = validate(&neg);
        assert_eq!(v, vec![Violation::NegativeCost { vertex: 1 }]);
        assert!(v[0].to_string().contains("negative cost"));

        let mut dup = triangle().to_doc();
        dup.edges.push((1, 0, JsonRational(int(2))));
        dup.edges.push((0, 9, JsonRational(int(2))));
        assert_eq!(
            validate(&dup),
            vec![
                Violation::DuplicateEdge { u: 0, v: 1 },
                Violation::VertexOutOfRange { id: 9 }
            ]
        );
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let t = triangle();
        let text = t.to_canonical_json();
        let back = QkpInstance::from_json(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_canonical_json(), text);
        let keys: Vec<_> = text.lines().filter(|l| l.starts_with("  \"")).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn parses_rational_strings() {
        let text = r#"{"n": 2, "limit": "3/2", "costs": [1, "1/2"], "vertex_profits": [0, 0.25],
                       "edges": [[1, 0, "5/3"]]}"#;
        let inst = QkpInstance::from_json(text).unwrap();
        assert_eq!(inst.edges()[0].u, 0);
        assert_eq!(inst.edge_profit(1, 0), Some(&crate::rational::ratio(5, 3)));
        assert_eq!(inst.vertex_profits()[1], crate::rational::ratio(1, 4));
    }
}
