//! Instance preparation: pruning, power-of-two profit rounding and dyadic
//! cost bucketing.

use num::{Signed, Zero};

use crate::error::{QkpError, Result};
use crate::instance::QkpInstance;
use crate::rational::{ceil_log2, floor_log2, floor_log2_u64, pow2, Rational};

/// Output of [`prune`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pruned {
    pub instance: QkpInstance,
    /// Profit collected from folded zero-cost vertices.
    pub base_profit: Rational,
    /// Original ids of the folded zero-cost vertices.
    pub always_include: Vec<usize>,
    /// `orig_of[reduced id] = original id`.
    pub orig_of: Vec<usize>,
}

/// Remove everything that cannot appear in a feasible solution and fold
/// zero-cost vertices into their neighbors.
///
/// - vertices with `cost > limit` go, with their edges;
/// - edges with `cost[u] + cost[v] > limit` or zero profit go;
/// - zero-cost vertices are folded in id order: their vertex profit moves to
///   `base_profit` and each incident edge profit moves onto the neighbor's
///   vertex profit.
pub fn prune(inst: &QkpInstance) -> Pruned {
    let n = inst.n();
    let limit = inst.limit();
    let kept: Vec<bool> = inst.costs().iter().map(|c| c <= limit).collect();
    let mut vprofit: Vec<Rational> = inst.vertex_profits().to_vec();
    let mut live: Vec<bool> = inst
        .edges()
        .iter()
        .map(|e| {
            kept[e.u]
                && kept[e.v]
                && e.profit.is_positive()
                && inst.cost(e.u) + inst.cost(e.v) <= *limit
        })
        .collect();

    let mut base_profit = Rational::zero();
    let mut always_include = Vec::new();
    for z in (0..n).filter(|&z| kept[z] && inst.cost(z).is_zero()) {
        base_profit += &vprofit[z];
        always_include.push(z);
        for &(w, idx) in inst.neighbors(z) {
            if live[idx] {
                live[idx] = false;
                vprofit[w] += &inst.edges()[idx].profit;
            }
        }
    }

    let orig_of: Vec<usize> = (0..n)
        .filter(|&v| kept[v] && inst.cost(v).is_positive())
        .collect();
    let mut new_id = vec![usize::MAX; n];
    for (i, &v) in orig_of.iter().enumerate() {
        new_id[v] = i;
    }
    let edges = inst
        .edges()
        .iter()
        .zip(&live)
        .filter(|(_, &l)| l)
        .map(|(e, _)| (new_id[e.u], new_id[e.v], e.profit.clone()))
        .collect();
    let instance = QkpInstance::new(
        orig_of.iter().map(|&v| inst.cost(v).clone()).collect(),
        orig_of.iter().map(|&v| vprofit[v].clone()).collect(),
        edges,
        limit.clone(),
    )
    .expect("pruning preserves every instance invariant");

    Pruned {
        instance,
        base_profit,
        always_include,
        orig_of,
    }
}

/// Output of [`round_profits`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rounded {
    pub instance: QkpInstance,
    /// Descending `2^top, ..., 2^(top - q), 0`; empty when there is no
    /// positive edge profit.
    pub levels: Vec<Rational>,
    /// Exponent of the largest power of two at most the maximum edge profit.
    pub top_exp: Option<i64>,
    /// Number of halvings below the top level.
    pub q_levels: i64,
}

/// Smallest integer strictly above `2 log2 n`, i.e. `floor(log2 n^2) + 1`.
pub fn profit_level_count(n: usize) -> i64 {
    let n = n.max(1) as u64;
    floor_log2_u64(n * n) + 1
}

/// Smallest integer strictly above `log2 n`.
pub fn bucket_count(n: usize) -> usize {
    (floor_log2_u64(n.max(1) as u64) + 1) as usize
}

/// Round every edge profit down to the nearest power of two in
/// `{2^top, ..., 2^(top - q)}`; edges below the lowest level are dropped.
/// Vertex profits are left untouched.
pub fn round_profits(inst: &QkpInstance) -> Rounded {
    let q = profit_level_count(inst.n());
    let Some(p_star) = inst
        .edges()
        .iter()
        .map(|e| &e.profit)
        .filter(|p| p.is_positive())
        .max()
    else {
        return Rounded {
            instance: inst.clone(),
            levels: Vec::new(),
            top_exp: None,
            q_levels: q,
        };
    };
    let top = floor_log2(p_star);
    let bottom = top - q;
    let mut levels: Vec<Rational> = (bottom..=top).rev().map(pow2).collect();
    levels.push(Rational::zero());

    let edges = inst
        .edges()
        .iter()
        .filter(|e| e.profit.is_positive() && floor_log2(&e.profit) >= bottom)
        .map(|e| (e.u, e.v, pow2(floor_log2(&e.profit))))
        .collect();
    let instance = QkpInstance::new(
        inst.costs().to_vec(),
        inst.vertex_profits().to_vec(),
        edges,
        inst.limit().clone(),
    )
    .expect("rounding preserves every instance invariant");
    Rounded {
        instance,
        levels,
        top_exp: Some(top),
        q_levels: q,
    }
}

/// Output of [`bucket_costs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Buckets {
    /// Bucket index in `1..=l_buckets + 1` per vertex.
    pub bucket_of: Vec<usize>,
    /// `2^k_exp` is the smallest power of two at least the maximum cost.
    pub k_exp: i64,
    pub l_buckets: usize,
}

impl Buckets {
    pub fn tail(&self) -> usize {
        self.l_buckets + 1
    }

    /// Half-open cost range `(low, high]` of bucket `i`.
    pub fn range(&self, i: usize) -> (Rational, Rational) {
        let l = self.l_buckets as i64;
        if i == self.tail() {
            (Rational::zero(), pow2(self.k_exp - l))
        } else {
            let i = i as i64;
            (pow2(self.k_exp - i), pow2(self.k_exp + 1 - i))
        }
    }
}

/// Assign every vertex to the dyadic bucket `V_i` with
/// `2^(k-i) < cost <= 2^(k+1-i)`, or to the tail bucket `l + 1` when
/// `cost <= 2^(k-l)`. All costs must be positive.
pub fn bucket_costs(inst: &QkpInstance) -> Result<Buckets> {
    if let Some(v) = (0..inst.n()).find(|&v| !inst.cost(v).is_positive()) {
        return Err(QkpError::Input(format!(
            "bucketing needs positive costs; vertex {v} has cost {}",
            inst.cost(v)
        )));
    }
    let l = bucket_count(inst.n());
    let Some(c_star) = inst.costs().iter().max() else {
        return Ok(Buckets {
            bucket_of: Vec::new(),
            k_exp: 0,
            l_buckets: l,
        });
    };
    let k = ceil_log2(c_star);
    let bucket_of = inst
        .costs()
        .iter()
        .map(|c| {
            let i = (k + 1 - ceil_log2(c)) as usize;
            i.min(l + 1)
        })
        .collect();
    Ok(Buckets {
        bucket_of,
        k_exp: k,
        l_buckets: l,
    })
}

/// The pruned, rounded and bucketed instance plus everything needed to lift
/// a reduced solution back to the original ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreparedInstance {
    /// Pruned and relabeled, original (unrounded) profits.
    pub pruned: QkpInstance,
    /// `pruned` with edge profits rounded.
    pub reduced: QkpInstance,
    pub base_profit: Rational,
    pub always_include: Vec<usize>,
    pub orig_of: Vec<usize>,
    pub profit_levels: Vec<Rational>,
    pub top_profit_exp: Option<i64>,
    pub q_levels: i64,
    pub buckets: Buckets,
}

impl PreparedInstance {
    pub fn k_exp(&self) -> i64 {
        self.buckets.k_exp
    }

    pub fn l_buckets(&self) -> usize {
        self.buckets.l_buckets
    }

    pub fn bucket_of(&self, v: usize) -> usize {
        self.buckets.bucket_of[v]
    }

    /// Map reduced ids to original ids and add the always-included vertices.
    pub fn lift(&self, reduced: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = reduced
            .iter()
            .map(|&v| self.orig_of[v])
            .chain(self.always_include.iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn prepare(inst: &QkpInstance) -> PreparedInstance {
    let pruned = prune(inst);
    let rounded = round_profits(&pruned.instance);
    let buckets = bucket_costs(&rounded.instance).expect("pruned costs are positive");
    PreparedInstance {
        pruned: pruned.instance,
        reduced: rounded.instance,
        base_profit: pruned.base_profit,
        always_include: pruned.always_include,
        orig_of: pruned.orig_of,
        profit_levels: rounded.levels,
        top_profit_exp: rounded.top_exp,
        q_levels: rounded.q_levels,
        buckets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn inst(
        costs: &[Rational],
        vp: &[Rational],
        edges: &[(usize, usize, Rational)],
        limit: Rational,
    ) -> QkpInstance {
        QkpInstance::new(costs.to_vec(), vp.to_vec(), edges.to_vec(), limit).unwrap()
    }

    #[test]
    fn prune_drops_heavy_vertex() {
        let i = inst(
            &[int(5), int(12)],
            &[int(0), int(0)],
            &[(0, 1, int(3))],
            int(10),
        );
        let p = prune(&i);
        assert_eq!(p.instance.n(), 1);
        assert!(p.instance.edges().is_empty());
        assert_eq!(p.orig_of, vec![0]);
    }

    #[test]
    fn prune_folds_zero_cost_vertex() {
        let i = inst(
            &[int(0), int(1)],
            &[int(2), int(1)],
            &[(0, 1, int(5))],
            int(1),
        );
        let p = prune(&i);
        assert_eq!(p.base_profit, int(2));
        assert_eq!(p.always_include, vec![0]);
        assert_eq!(p.instance.n(), 1);
        assert_eq!(p.instance.vertex_profits()[0], int(6));
    }

    #[test]
    fn prune_drops_unaffordable_pair() {
        let i = inst(
            &[int(6), int(6)],
            &[int(0), int(0)],
            &[(0, 1, int(4))],
            int(10),
        );
        let p = prune(&i);
        assert_eq!(p.instance.n(), 2);
        assert!(p.instance.edges().is_empty());
    }

    #[test]
    fn prune_chains_zero_cost_vertices() {
        // 0 and 1 are free and adjacent; 2 is paid and adjacent to 1
        let i = inst(
            &[int(0), int(0), int(3)],
            &[int(1), int(2), int(0)],
            &[(0, 1, int(4)), (1, 2, int(8)), (0, 2, int(0))],
            int(5),
        );
        let p = prune(&i);
        assert_eq!(p.base_profit, int(1 + 2 + 4));
        assert_eq!(p.always_include, vec![0, 1]);
        assert_eq!(p.instance.vertex_profits(), &[int(8)]);
    }

    #[test]
    fn rounding_levels() {
        let i = inst(
            &vec![int(1); 4],
            &vec![int(0); 4],
            &[(0, 1, int(10)), (1, 2, int(3)), (2, 3, ratio(1, 5))],
            int(4),
        );
        let r = round_profits(&i);
        assert_eq!(r.q_levels, 5);
        assert_eq!(
            r.levels,
            vec![
                int(8),
                int(4),
                int(2),
                int(1),
                ratio(1, 2),
                ratio(1, 4),
                int(0)
            ]
        );
        let e = r.instance.edges();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].profit, int(8));
        assert_eq!(e[1].profit, int(2));
    }

    #[test]
    fn rounding_single_edge_and_fixed_point() {
        let i = inst(
            &vec![int(1); 2],
            &vec![int(0); 2],
            &[(0, 1, int(7))],
            int(2),
        );
        assert_eq!(round_profits(&i).instance.edges()[0].profit, int(4));

        let j = inst(
            &vec![int(1); 3],
            &vec![int(3); 3],
            &[(0, 1, int(4)), (1, 2, int(1))],
            int(2),
        );
        assert_eq!(round_profits(&j).instance, j);
    }

    #[test]
    fn rounding_without_edges() {
        let i = inst(&[int(1)], &[int(3)], &[], int(2));
        let r = round_profits(&i);
        assert!(r.levels.is_empty());
        assert_eq!(r.instance, i);
    }

    #[test]
    fn level_and_bucket_counts_are_strict() {
        assert_eq!(profit_level_count(4), 5);
        assert_eq!(profit_level_count(1), 1);
        assert_eq!(profit_level_count(3), 4);
        assert_eq!(bucket_count(8), 4);
        assert_eq!(bucket_count(2), 2);
        assert_eq!(bucket_count(7), 3);
    }

    #[test]
    fn buckets_by_inequality() {
        let costs = [
            int(10),
            int(3),
            ratio(1, 2),
            int(1),
            int(1),
            int(1),
            int(1),
            int(1),
        ];
        let i = inst(&costs, &vec![int(0); 8], &[], int(10));
        let b = bucket_costs(&i).unwrap();
        assert_eq!(b.k_exp, 4);
        assert_eq!(b.l_buckets, 4);
        assert_eq!(b.bucket_of[0], 1);
        assert_eq!(b.bucket_of[1], 3);
        assert_eq!(b.bucket_of[2], 5);
        // cost 1 = 2^(4-4) sits in the tail
        assert_eq!(b.bucket_of[3], 5);
        for (v, c) in costs.iter().enumerate() {
            let (lo, hi) = b.range(b.bucket_of[v]);
            assert!(lo < *c && *c <= hi);
        }
    }

    #[test]
    fn bucket_two_vertex_case() {
        let i = inst(&[int(1), int(1)], &vec![int(0); 2], &[], int(1));
        let b = bucket_costs(&i).unwrap();
        assert_eq!((b.k_exp, b.l_buckets), (0, 2));
        // 2^-1 < 1 <= 2^0
        assert_eq!(b.bucket_of, vec![1, 1]);
    }

    #[test]
    fn bucketing_rejects_zero_cost() {
        let i = inst(&[int(0)], &[int(0)], &[], int(1));
        assert!(bucket_costs(&i).is_err());
    }
}
