//! Exact solver for small instances, used as the reference optimum in tests
//! and benchmarks.

use crate::error::{QkpError, Result};
use crate::instance::{QkpInstance, Solution};
use crate::rational::integer_view;

pub const DEFAULT_MAX_N: usize = 22;

/// Optimal solution by depth-first include/exclude search.
///
/// Branches are cut when the partial cost exceeds the limit or when the
/// current profit plus every still-reachable vertex and edge profit cannot
/// beat the incumbent.
pub fn exact_qkp(inst: &QkpInstance, max_n: usize) -> Result<Solution> {
    let n = inst.n();
    if n > max_n {
        return Err(QkpError::Capacity(format!(
            "exact oracle limited to {max_n} vertices, instance has {n}"
        )));
    }
    let overflow =
        || QkpError::Capacity("instance values overflow the oracle's integer view".into());
    let cost_view = integer_view(inst.costs().iter().chain(std::iter::once(inst.limit())))
        .ok_or_else(overflow)?;
    let (costs, limit) = (&cost_view[..n], cost_view[n]);
    let profit_view = integer_view(
        inst.vertex_profits()
            .iter()
            .chain(inst.edges().iter().map(|e| &e.profit)),
    )
    .ok_or_else(overflow)?;
    let (vprofit, eprofit) = profit_view.split_at(n);

    // profits of edges to later vertices, keyed by the earlier endpoint
    let mut forward: Vec<Vec<(usize, i128)>> = vec![Vec::new(); n];
    for (e, &p) in inst.edges().iter().zip(eprofit) {
        forward[e.u].push((e.v, p));
    }
    let mut suffix = vec![0i128; n + 1];
    for v in (0..n).rev() {
        suffix[v] = suffix[v + 1] + vprofit[v] + forward[v].iter().map(|&(_, p)| p).sum::<i128>();
    }

    let mut search = Search {
        costs,
        limit,
        vprofit,
        forward: &forward,
        suffix: &suffix,
        link: vec![0; n],
        link_rest: 0,
        chosen: Vec::new(),
        best_profit: -1,
        best: Vec::new(),
    };
    search.run(0, 0, 0);
    Solution::evaluated(inst, search.best)
}

struct Search<'a> {
    costs: &'a [i128],
    limit: i128,
    vprofit: &'a [i128],
    forward: &'a [Vec<(usize, i128)>],
    suffix: &'a [i128],
    // edge profit from each undecided vertex into the chosen set
    link: Vec<i128>,
    link_rest: i128,
    chosen: Vec<usize>,
    best_profit: i128,
    best: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, i: usize, cost: i128, profit: i128) {
        if profit > self.best_profit {
            self.best_profit = profit;
            self.best = self.chosen.clone();
        }
        if i == self.costs.len() || profit + self.suffix[i] + self.link_rest <= self.best_profit {
            return;
        }
        let own_link = self.link[i];
        self.link_rest -= own_link;

        if cost + self.costs[i] <= self.limit {
            self.chosen.push(i);
            for &(w, p) in &self.forward[i] {
                self.link[w] += p;
                self.link_rest += p;
            }
            self.run(
                i + 1,
                cost + self.costs[i],
                profit + self.vprofit[i] + own_link,
            );
            for &(w, p) in &self.forward[i] {
                self.link[w] -= p;
                self.link_rest -= p;
            }
            self.chosen.pop();
        }
        self.run(i + 1, cost, profit);

        self.link_rest += own_link;
    }
}

/// Plain `2^n` enumeration, for cross-checking [`exact_qkp`].
pub fn enumerate_qkp(inst: &QkpInstance) -> Result<Solution> {
    let n = inst.n();
    if n > 20 {
        return Err(QkpError::Capacity(format!(
            "enumeration limited to 20 vertices, got {n}"
        )));
    }
    let mut best: Option<Solution> = None;
    for mask in 0u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let s = Solution::evaluated(inst, set)?;
        if s.total_cost <= *inst.limit()
            && best
                .as_ref()
                .is_none_or(|b| s.total_profit > b.total_profit)
        {
            best = Some(s);
        }
    }
    Ok(best.expect("the empty set is always feasible"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, Rational};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn triangle_limit_two() {
        let t = QkpInstance::new(
            ints(&[1, 1, 1]),
            ints(&[0, 0, 0]),
            vec![(0, 1, int(1)), (1, 2, int(1)), (0, 2, int(1))],
            int(2),
        )
        .unwrap();
        assert_eq!(exact_qkp(&t, 22).unwrap().total_profit, int(1));
        assert_eq!(enumerate_qkp(&t).unwrap().total_profit, int(1));
    }

    #[test]
    fn zero_limit_free_vertex() {
        let i = QkpInstance::new(ints(&[0, 2]), ints(&[5, 9]), vec![], int(0)).unwrap();
        let s = exact_qkp(&i, 22).unwrap();
        assert_eq!(s.total_profit, int(5));
        assert_eq!(s.vertices, vec![0]);
    }

    #[test]
    fn all_zero_profits() {
        let i =
            QkpInstance::new(ints(&[1, 1]), ints(&[0, 0]), vec![(0, 1, int(0))], int(5)).unwrap();
        assert_eq!(exact_qkp(&i, 22).unwrap().total_profit, int(0));
    }

    #[test]
    fn size_guard() {
        let i = QkpInstance::new(vec![int(1); 5], vec![int(1); 5], vec![], int(5)).unwrap();
        assert!(matches!(exact_qkp(&i, 4), Err(QkpError::Capacity(_))));
    }
}
