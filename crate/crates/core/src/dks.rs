//! Densest-k-subgraph backends.
//!
//! The reduction treats the densest-k-subgraph solver as a black box with a
//! claimed ratio exponent α. Two backends ship: an exact branch-and-bound
//! (α = 0) for small graphs and min-degree peeling (labelled α = 1/2).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QkpError, Result};
use crate::graph::Graph;
use crate::rational::{ratio, Rational};

pub trait DksBackend: Send + Sync {
    fn name(&self) -> &'static str;

    /// Exponent α of the approximation ratio O(n^α) this backend claims.
    fn declared_alpha(&self) -> Rational;

    /// Return up to `k` vertices approximately maximizing the induced edge
    /// count. Callers go through [`solve_dks`], which fixes the output size.
    fn densest(&self, graph: &Graph, k: usize) -> Result<Vec<usize>>;
}

/// Backend selector used by configuration and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DksChoice {
    Exact,
    Greedy,
}

impl DksChoice {
    pub fn backend(self) -> Box<dyn DksBackend> {
        match self {
            DksChoice::Exact => Box::new(ExactDks::default()),
            DksChoice::Greedy => Box::new(GreedyPeel),
        }
    }
}

impl fmt::Display for DksChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DksChoice::Exact => "exact",
            DksChoice::Greedy => "greedy",
        })
    }
}

impl FromStr for DksChoice {
    type Err = QkpError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(DksChoice::Exact),
            "greedy" => Ok(DksChoice::Greedy),
            other => Err(QkpError::Input(format!("unknown dks backend {other:?}"))),
        }
    }
}

/// Run `backend` and normalize its output to exactly `min(k, n)` distinct
/// vertices, sorted. Short outputs are padded with the smallest unused ids.
pub fn solve_dks(graph: &Graph, k: usize, backend: &dyn DksBackend) -> Result<Vec<usize>> {
    let target = k.min(graph.n());
    if target == 0 {
        return Ok(Vec::new());
    }
    let raw = backend.densest(graph, target)?;
    let mut set: BTreeSet<usize> = raw.into_iter().filter(|&v| v < graph.n()).collect();
    if set.len() > target {
        return Err(QkpError::Internal(format!(
            "{} backend returned {} vertices for k = {target}",
            backend.name(),
            set.len()
        )));
    }
    let mut next = 0;
    while set.len() < target {
        set.insert(next);
        next += 1;
    }
    Ok(set.into_iter().collect())
}

/// Like [`solve_dks`], but a capacity error from the backend degrades to
/// greedy peeling. The second value is true when the fallback was used.
pub fn solve_dks_or_greedy(
    graph: &Graph,
    k: usize,
    backend: &dyn DksBackend,
) -> Result<(Vec<usize>, bool)> {
    match solve_dks(graph, k, backend) {
        Ok(set) => Ok((set, false)),
        Err(QkpError::Capacity(_)) => Ok((solve_dks(graph, k, &GreedyPeel)?, true)),
        Err(e) => Err(e),
    }
}

/// Exact densest-k-subgraph by depth-first branch and bound.
///
/// Vertices are branched in id order, include first, and only strict
/// improvements replace the incumbent, so the lexicographically smallest
/// optimal set is returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactDks {
    pub max_vertices: usize,
    pub max_nodes: u64,
}

impl Default for ExactDks {
    fn default() -> Self {
        ExactDks {
            max_vertices: 25,
            max_nodes: 20_000_000,
        }
    }
}

impl DksBackend for ExactDks {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn declared_alpha(&self) -> Rational {
        ratio(0, 1)
    }

    fn densest(&self, graph: &Graph, k: usize) -> Result<Vec<usize>> {
        dks_exact(graph, k, self)
    }
}

pub fn dks_exact(graph: &Graph, k: usize, limits: &ExactDks) -> Result<Vec<usize>> {
    let n = graph.n();
    if k >= n {
        return Ok((0..n).collect());
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    if n > limits.max_vertices {
        return Err(QkpError::Capacity(format!(
            "exact densest subgraph limited to {} vertices, graph has {n}",
            limits.max_vertices
        )));
    }
    let mut search = BranchAndBound {
        graph,
        k,
        max_nodes: limits.max_nodes,
        nodes: 0,
        chosen: Vec::with_capacity(k),
        conn: vec![0; n],
        best_edges: None,
        best: Vec::new(),
        scratch_a: Vec::with_capacity(n),
        scratch_b: Vec::with_capacity(n),
    };
    search.run(0, 0)?;
    Ok(search.best)
}

struct BranchAndBound<'g> {
    graph: &'g Graph,
    k: usize,
    max_nodes: u64,
    nodes: u64,
    chosen: Vec<usize>,
    // neighbors of each vertex inside `chosen`
    conn: Vec<usize>,
    best_edges: Option<usize>,
    best: Vec<usize>,
    scratch_a: Vec<usize>,
    scratch_b: Vec<usize>,
}

impl BranchAndBound<'_> {
    fn run(&mut self, i: usize, edges: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(QkpError::Capacity(format!(
                "exact densest subgraph exceeded {} search nodes",
                self.max_nodes
            )));
        }
        let n = self.graph.n();
        let remaining = self.k - self.chosen.len();
        if remaining == 0 {
            if self.best_edges.is_none_or(|b| edges > b) {
                self.best_edges = Some(edges);
                self.best = self.chosen.clone();
            }
            return Ok(());
        }
        if n - i < remaining {
            return Ok(());
        }
        if let Some(best) = self.best_edges {
            if self.upper_bound(i, edges, remaining) <= best {
                return Ok(());
            }
        }

        self.chosen.push(i);
        for &w in self.graph.neighbors(i) {
            self.conn[w] += 1;
        }
        let gained = self.conn[i];
        self.run(i + 1, edges + gained)?;
        for &w in self.graph.neighbors(i) {
            self.conn[w] -= 1;
        }
        self.chosen.pop();

        self.run(i + 1, edges)
    }

    /// Edges to the chosen set from the best `remaining` candidates, plus
    /// half the best possible internal degrees among them.
    fn upper_bound(&mut self, i: usize, edges: usize, remaining: usize) -> usize {
        let n = self.graph.n();
        self.scratch_a.clear();
        self.scratch_b.clear();
        for v in i..n {
            self.scratch_a.push(self.conn[v]);
            let free = self.graph.degree(v) - self.conn[v];
            self.scratch_b.push(free.min(remaining - 1));
        }
        self.scratch_a.sort_unstable_by(|a, b| b.cmp(a));
        self.scratch_b.sort_unstable_by(|a, b| b.cmp(a));
        let to_chosen: usize = self.scratch_a[..remaining].iter().sum();
        let internal: usize = self.scratch_b[..remaining].iter().sum();
        edges + to_chosen + internal / 2
    }
}

/// Min-degree peeling heuristic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyPeel;

impl DksBackend for GreedyPeel {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn declared_alpha(&self) -> Rational {
        ratio(1, 2)
    }

    fn densest(&self, graph: &Graph, k: usize) -> Result<Vec<usize>> {
        Ok(dks_greedy_peel(graph, k))
    }
}

/// Repeatedly delete a minimum-degree vertex (smallest id on ties) until
/// `k` vertices remain.
pub fn dks_greedy_peel(graph: &Graph, k: usize) -> Vec<usize> {
    let n = graph.n();
    if k >= n {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (degree[v], v)).collect();
    let mut left = n;
    while left > k {
        let (_, v) = queue.pop_first().expect("queue holds every live vertex");
        alive[v] = false;
        left -= 1;
        for &w in graph.neighbors(v) {
            if alive[w] {
                queue.remove(&(degree[w], w));
                degree[w] -= 1;
                queue.insert((degree[w], w));
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(graph: &Graph, k: usize) -> usize {
        let n = graph.n();
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| {
                let set: Vec<usize> = (0..n).filter(|&v| m >> v & 1 == 1).collect();
                graph.induced_edges(&set)
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn exact_on_triangle_and_star() {
        let tri = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let s = solve_dks(&tri, 2, &ExactDks::default()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(tri.induced_edges(&s), 1);

        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]);
        let s = solve_dks(&star, 2, &ExactDks::default()).unwrap();
        assert_eq!(star.induced_edges(&s), 1);
        assert!(s.contains(&0));
    }

    #[test]
    fn exact_finds_full_triangle() {
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let s = solve_dks(&g, 3, &ExactDks::default()).unwrap();
        assert_eq!(g.induced_edges(&s), 3);
        assert_eq!(brute_force(&g, 3), 3);
        assert_eq!(s, vec![0, 1, 2]);
    }

    #[test]
    fn zero_k_is_empty() {
        let g = Graph::from_edges(3, [(0, 1)]);
        assert!(solve_dks(&g, 0, &ExactDks::default()).unwrap().is_empty());
        assert!(solve_dks(&g, 0, &GreedyPeel).unwrap().is_empty());
    }

    #[test]
    fn exact_guard_reports_capacity() {
        let g = Graph::from_edges(30, (0..29).map(|v| (v, v + 1)));
        let r = dks_exact(&g, 5, &ExactDks::default());
        assert!(matches!(r, Err(QkpError::Capacity(_))));
        let (set, fell_back) = solve_dks_or_greedy(&g, 5, &ExactDks::default()).unwrap();
        assert!(fell_back);
        assert_eq!(set.len(), 5);
    }

    #[test]
    fn peeling_examples() {
        let path = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        // ties go to the smaller id: 0 goes first, then 1
        let s = dks_greedy_peel(&path, 2);
        assert_eq!(s, vec![2, 3]);
        assert_eq!(path.induced_edges(&s), 1);

        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let s = dks_greedy_peel(&k4, 3);
        assert_eq!(k4.induced_edges(&s), 3);

        let empty = Graph::from_edges(5, []);
        let s = solve_dks(&empty, 2, &GreedyPeel).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(empty.induced_edges(&s), 0);
    }

    #[test]
    fn peeling_recovers_clique_with_tendrils() {
        // K5 on 0..5, each clique vertex has a pendant path of length 2
        let mut edges = vec![];
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        for u in 0..5 {
            let a = 5 + 2 * u;
            edges.push((u, a));
            edges.push((a, a + 1));
        }
        let g = Graph::from_edges(15, edges);
        assert_eq!(dks_greedy_peel(&g, 5), vec![0, 1, 2, 3, 4]);
        assert_eq!(brute_force(&g, 5), 10);
    }

    #[test]
    fn output_size_is_min_k_n() {
        let g = Graph::from_edges(3, [(0, 1)]);
        for k in 0..6 {
            assert_eq!(solve_dks(&g, k, &GreedyPeel).unwrap().len(), k.min(3));
            assert_eq!(
                solve_dks(&g, k, &ExactDks::default()).unwrap().len(),
                k.min(3)
            );
        }
    }
}
