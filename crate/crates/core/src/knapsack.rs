//! 0/1 knapsack: a profit-scaling FPTAS, an exact solver for tests, and an
//! exact dynamic program for small integral profits.

use num::{BigInt, Signed, ToPrimitive, Zero};

use crate::error::{QkpError, Result};
use crate::rational::{integer_view, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub cost: Rational,
    pub profit: Rational,
}

impl Item {
    pub fn new(cost: Rational, profit: Rational) -> Self {
        Item { cost, profit }
    }
}

/// Largest table (items × profit or cost cells) any dynamic program here
/// will allocate.
const MAX_DP_CELLS: u128 = 200_000_000;

/// Profit-scaling FPTAS. The returned item indices (sorted) fit within
/// `capacity` and reach at least `(1 - eps)` of the optimum.
///
/// Zero-cost items are always taken. Profits are scaled by
/// `K = eps * p_max / m` and floored before an exact minimum-cost DP over
/// scaled profit.
pub fn knapsack_fptas(items: &[Item], capacity: &Rational, eps: &Rational) -> Result<Vec<usize>> {
    if !(eps.is_positive() && *eps < Rational::from_integer(1.into())) {
        return Err(QkpError::Input(format!(
            "knapsack eps must lie in (0, 1), got {eps}"
        )));
    }
    let mut chosen: Vec<usize> = (0..items.len())
        .filter(|&i| items[i].cost.is_zero())
        .collect();
    let candidates: Vec<usize> = (0..items.len())
        .filter(|&i| {
            let it = &items[i];
            it.cost.is_positive() && it.cost <= *capacity && it.profit.is_positive()
        })
        .collect();
    if candidates.is_empty() {
        return Ok(chosen);
    }
    let m = candidates.len();
    let p_max = candidates
        .iter()
        .map(|&i| &items[i].profit)
        .max()
        .expect("non-empty");
    let scale = Rational::from_integer(BigInt::from(m)) / (eps * p_max);
    let scaled: Vec<u64> = candidates
        .iter()
        .map(|&i| {
            (&items[i].profit * &scale)
                .floor()
                .to_integer()
                .to_u64()
                .expect("scaled profit is at most m / eps")
        })
        .collect();
    let (costs, cap) = cost_view(candidates.iter().map(|&i| &items[i].cost), capacity)?;
    let picked = profit_dp(&costs, &scaled, cap)?;
    chosen.extend(picked.into_iter().map(|j| candidates[j]));
    chosen.sort_unstable();
    Ok(chosen)
}

/// Exact knapsack over items whose profits are small non-negative integers.
/// Zero-cost items are always taken.
pub fn knapsack_small_profit(
    costs: &[Rational],
    profits: &[u64],
    capacity: &Rational,
) -> Result<Vec<usize>> {
    assert_eq!(costs.len(), profits.len());
    let mut chosen: Vec<usize> = (0..costs.len()).filter(|&i| costs[i].is_zero()).collect();
    let candidates: Vec<usize> = (0..costs.len())
        .filter(|&i| costs[i].is_positive() && costs[i] <= *capacity && profits[i] > 0)
        .collect();
    let total: Rational = candidates.iter().map(|&i| &costs[i]).sum();
    if total <= *capacity {
        chosen.extend(candidates);
    } else {
        let (c, cap) = cost_view(candidates.iter().map(|&i| &costs[i]), capacity)?;
        let p: Vec<u64> = candidates.iter().map(|&i| profits[i]).collect();
        chosen.extend(profit_dp(&c, &p, cap)?.into_iter().map(|j| candidates[j]));
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Exact 0/1 knapsack.
///
/// Uses a cost-indexed DP when every cost and the capacity are integers and
/// the table fits the cell budget; otherwise branch-and-bound enumeration for
/// at most 25 items. Zero-cost items are always taken.
pub fn knapsack_exact(items: &[Item], capacity: &Rational) -> Result<Vec<usize>> {
    let mut chosen: Vec<usize> = (0..items.len())
        .filter(|&i| items[i].cost.is_zero())
        .collect();
    let candidates: Vec<usize> = (0..items.len())
        .filter(|&i| {
            let it = &items[i];
            it.cost.is_positive() && it.cost <= *capacity && it.profit.is_positive()
        })
        .collect();
    if candidates.is_empty() {
        return Ok(chosen);
    }
    let profits = integer_view(candidates.iter().map(|&i| &items[i].profit))
        .ok_or_else(|| QkpError::Capacity("knapsack profits overflow i128".into()))?;

    let integral = candidates.iter().all(|&i| items[i].cost.is_integer());
    let cap_int = capacity.floor().to_integer().to_u64();
    let picked = match cap_int {
        Some(cap) if integral && (candidates.len() as u128) * (cap as u128 + 1) <= MAX_DP_CELLS => {
            let costs: Vec<u64> = candidates
                .iter()
                .map(|&i| {
                    items[i]
                        .cost
                        .to_integer()
                        .to_u64()
                        .expect("cost <= capacity")
                })
                .collect();
            cost_dp(&costs, &profits, cap)
        }
        _ if candidates.len() <= 25 => {
            let (costs, cap) = cost_view(candidates.iter().map(|&i| &items[i].cost), capacity)?;
            enumerate_best(&costs, &profits, cap)
        }
        _ => {
            return Err(QkpError::Capacity(format!(
                "exact knapsack over {} items with non-integral or large capacity",
                candidates.len()
            )))
        }
    };
    chosen.extend(picked.into_iter().map(|j| candidates[j]));
    chosen.sort_unstable();
    Ok(chosen)
}

fn cost_view<'a>(
    costs: impl Iterator<Item = &'a Rational>,
    capacity: &'a Rational,
) -> Result<(Vec<i128>, i128)> {
    let all: Vec<&Rational> = costs.chain(std::iter::once(capacity)).collect();
    let mut ints = integer_view(all.iter().copied())
        .ok_or_else(|| QkpError::Capacity("knapsack costs overflow i128".into()))?;
    let cap = ints.pop().expect("capacity appended");
    Ok((ints, cap))
}

struct BitTable {
    width: usize,
    words: Vec<u64>,
}

impl BitTable {
    fn new(rows: usize, width: usize) -> Self {
        BitTable {
            width,
            words: vec![0; (rows * width).div_ceil(64)],
        }
    }

    fn set(&mut self, row: usize, col: usize) {
        let bit = row * self.width + col;
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    fn get(&self, row: usize, col: usize) -> bool {
        let bit = row * self.width + col;
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }
}

/// Minimum-cost DP indexed by total profit. Returns the indices of a subset
/// with maximum total profit whose cost is at most `cap`.
fn profit_dp(costs: &[i128], profits: &[u64], cap: i128) -> Result<Vec<usize>> {
    let total: u64 = profits.iter().sum();
    let width = total as usize + 1;
    if (costs.len() as u128) * (width as u128) > MAX_DP_CELLS {
        return Err(QkpError::Capacity(format!(
            "knapsack profit table of {} x {width} cells",
            costs.len()
        )));
    }
    const INF: i128 = i128::MAX;
    let mut best = vec![INF; width];
    best[0] = 0;
    let mut take = BitTable::new(costs.len(), width);
    let mut reach = 0usize;
    for (i, (&c, &p)) in costs.iter().zip(profits).enumerate() {
        let p = p as usize;
        for q in (p..=reach + p).rev() {
            let prev = best[q - p];
            if prev != INF && prev + c < best[q] {
                best[q] = prev + c;
                take.set(i, q);
            }
        }
        reach += p;
    }
    let target = (0..width).rev().find(|&q| best[q] <= cap).unwrap_or(0);
    let mut out = Vec::new();
    let mut q = target;
    for i in (0..costs.len()).rev() {
        if take.get(i, q) {
            out.push(i);
            q -= profits[i] as usize;
        }
    }
    out.reverse();
    Ok(out)
}

/// Maximum-profit DP indexed by integral cost.
fn cost_dp(costs: &[u64], profits: &[i128], cap: u64) -> Vec<usize> {
    let width = cap as usize + 1;
    let mut best = vec![0i128; width];
    let mut take = BitTable::new(costs.len(), width);
    for (i, (&c, &p)) in costs.iter().zip(profits).enumerate() {
        let c = c as usize;
        for w in (c..width).rev() {
            if best[w - c] + p > best[w] {
                best[w] = best[w - c] + p;
                take.set(i, w);
            }
        }
    }
    let mut out = Vec::new();
    let mut w = width - 1;
    for i in (0..costs.len()).rev() {
        if take.get(i, w) {
            out.push(i);
            w -= costs[i] as usize;
        }
    }
    out.reverse();
    out
}

fn enumerate_best(costs: &[i128], profits: &[i128], cap: i128) -> Vec<usize> {
    let mut suffix = vec![0i128; costs.len() + 1];
    for i in (0..costs.len()).rev() {
        suffix[i] = suffix[i + 1] + profits[i];
    }
    let mut e = Enumeration {
        costs,
        profits,
        suffix: &suffix,
        cap,
        cur: Vec::new(),
        best: (0, Vec::new()),
    };
    e.run(0, 0, 0);
    e.best.1
}

struct Enumeration<'a> {
    costs: &'a [i128],
    profits: &'a [i128],
    suffix: &'a [i128],
    cap: i128,
    cur: Vec<usize>,
    best: (i128, Vec<usize>),
}

impl Enumeration<'_> {
    fn run(&mut self, i: usize, cost: i128, profit: i128) {
        if profit > self.best.0 {
            self.best = (profit, self.cur.clone());
        }
        if i == self.costs.len() || profit + self.suffix[i] <= self.best.0 {
            return;
        }
        if cost + self.costs[i] <= self.cap {
            self.cur.push(i);
            self.run(i + 1, cost + self.costs[i], profit + self.profits[i]);
            self.cur.pop();
        }
        self.run(i + 1, cost, profit);
    }
}

/// Total profit and cost of `subset`.
pub fn subset_value(items: &[Item], subset: &[usize]) -> (Rational, Rational) {
    subset
        .iter()
        .fold((Rational::zero(), Rational::zero()), |(c, p), &i| {
            (c + &items[i].cost, p + &items[i].profit)
        })
}
