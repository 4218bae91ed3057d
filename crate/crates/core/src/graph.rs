//! Simple undirected, unweighted graph used by the densest-subgraph backends
//! and the degree-selection steps of the class solvers.

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Build from an edge list; self-loops and duplicate edges are dropped.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(
                u < n && v < n,
                "edge ({u}, {v}) out of range for {n} vertices"
            );
            if u != v {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Graph {
            adj,
            edge_count: edge_count / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn membership(&self, set: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.n()];
        for &v in set {
            m[v] = true;
        }
        m
    }

    /// Number of edges with both endpoints in `set`.
    pub fn induced_edges(&self, set: &[usize]) -> usize {
        let m = self.membership(set);
        set.iter()
            .filter(|&&v| m[v])
            .map(|&v| self.adj[v].iter().filter(|&&w| w > v && m[w]).count())
            .sum()
    }

    /// Degree of every vertex within the subgraph induced by `set`
    /// (zero for vertices outside `set`).
    pub fn induced_degrees(&self, set: &[usize]) -> Vec<usize> {
        let m = self.membership(set);
        let mut deg = vec![0; self.n()];
        for v in (0..self.n()).filter(|&v| m[v]) {
            deg[v] = self.adj[v].iter().filter(|&&w| m[w]).count();
        }
        deg
    }

    /// Number of neighbors of `v` inside the membership mask.
    pub fn degree_into(&self, v: usize, mask: &[bool]) -> usize {
        self.adj[v].iter().filter(|&&w| mask[w]).count()
    }
}

/// The `count` entries of `candidates` with the largest score; ties go to
/// the smaller id. The result is sorted by id.
pub fn top_by_score(
    candidates: &[usize],
    count: usize,
    score: impl Fn(usize) -> usize,
) -> Vec<usize> {
    let mut ranked: Vec<usize> = candidates.to_vec();
    ranked.sort_by(|&a, &b| score(b).cmp(&score(a)).then(a.cmp(&b)));
    ranked.truncate(count);
    ranked.sort_unstable();
    ranked
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_degrees() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 2), (1, 1)]);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.degree(2), 3);
        assert_eq!(g.induced_edges(&[0, 1, 2]), 3);
        assert_eq!(g.induced_edges(&[0, 3]), 0);
        assert_eq!(g.induced_degrees(&[1, 2, 3]), vec![0, 1, 2, 1]);
        assert!(g.has_edge(3, 2));
        assert_eq!(
            g.edges().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (1, 2), (2, 3)]
        );
    }

    #[test]
    fn top_scores_break_ties_by_id() {
        let scores = [3, 5, 5, 1, 3];
        assert_eq!(
            top_by_score(&[0, 1, 2, 3, 4], 3, |v| scores[v]),
            vec![0, 1, 2]
        );
        assert_eq!(top_by_score(&[4, 3, 0], 1, |v| scores[v]), vec![0]);
        assert_eq!(top_by_score(&[1], 4, |v| scores[v]), vec![1]);
    }
}
