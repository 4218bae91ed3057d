//! Benchmark sweep: solve random instances, compare against the exact
//! oracle, and check the worst-case ratio floor.

use num::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dks::DksChoice;
use crate::error::{QkpError, Result};
use crate::generate::{generate, seeded_range, GenParams};
use crate::oracle::{exact_qkp, DEFAULT_MAX_N};
use crate::rational::{format_rational, rational_to_json, to_f64, Rational};
use crate::solver::{guaranteed_floor, solve, SolveConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchParams {
    pub trials: usize,
    /// Inclusive range of vertex counts.
    pub n_range: (usize, usize),
    pub dks: DksChoice,
    pub knapsack_eps: Rational,
    pub density: f64,
    pub max_cost: u64,
    pub max_profit: u64,
    pub limit_frac: Rational,
    pub seed: u64,
    pub oracle_max_n: usize,
}

impl Default for BenchParams {
    fn default() -> Self {
        BenchParams {
            trials: 20,
            n_range: (4, 12),
            dks: DksChoice::Exact,
            knapsack_eps: Rational::new(1.into(), 4.into()),
            density: 0.5,
            max_cost: 10,
            max_profit: 10,
            limit_frac: Rational::new(1.into(), 2.into()),
            seed: 0,
            oracle_max_n: DEFAULT_MAX_N,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub n: usize,
    pub seed: u64,
    pub opt: Rational,
    pub alg: Rational,
    /// `alg / opt`, or 1 when the optimum is zero.
    pub ratio: Rational,
    pub floor: Rational,
    pub winning_class: u8,
}

impl BenchRow {
    pub fn meets_floor(&self) -> bool {
        self.ratio >= self.floor
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchReport {
    pub dks: DksChoice,
    pub rows: Vec<BenchRow>,
    /// `(n, seed)` of trials whose size exceeded the oracle guard.
    pub skipped: Vec<(usize, u64)>,
}

impl BenchReport {
    pub fn floor_violations(&self) -> Vec<&BenchRow> {
        self.rows.iter().filter(|r| !r.meets_floor()).collect()
    }

    pub fn mean_ratio(&self) -> Option<f64> {
        if self.rows.is_empty() {
            return None;
        }
        Some(self.rows.iter().map(|r| to_f64(&r.ratio)).sum::<f64>() / self.rows.len() as f64)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dks": self.dks.to_string(),
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "seed": r.seed,
                "opt": rational_to_json(&r.opt),
                "alg": rational_to_json(&r.alg),
                "ratio": format_rational(&r.ratio),
                "floor": format_rational(&r.floor),
                "meets_floor": r.meets_floor(),
                "winning_class": r.winning_class,
            })).collect::<Vec<_>>(),
            "skipped": self.skipped.iter().map(|&(n, s)| json!({"n": n, "seed": s})).collect::<Vec<_>>(),
        })
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:>4} {:>8} {:>12} {:>12} {:>8} {:>12} {:>5} {:>4}\n",
            "n", "seed", "opt", "alg", "ratio", "floor", "class", "ok"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>4} {:>8} {:>12} {:>12} {:>8.4} {:>12} {:>5} {:>4}\n",
                r.n,
                r.seed,
                format_rational(&r.opt),
                format_rational(&r.alg),
                to_f64(&r.ratio),
                format_rational(&r.floor),
                r.winning_class,
                if r.meets_floor() { "yes" } else { "NO" }
            ));
        }
        for (n, seed) in &self.skipped {
            out.push_str(&format!(
                "skipped n={n} seed={seed}: exceeds oracle limit\n"
            ));
        }
        out
    }
}

/// Run `params.trials` trials. Trial `t` uses seed `params.seed + t` both to
/// draw its vertex count and to generate its instance. Rows are sorted by
/// `(n, seed)`.
pub fn run_bench(params: &BenchParams) -> Result<BenchReport> {
    let (lo, hi) = params.n_range;
    if lo > hi {
        return Err(QkpError::Input(format!("empty n range {lo}..={hi}")));
    }
    let cfg = SolveConfig {
        dks: params.dks,
        knapsack_eps: params.knapsack_eps.clone(),
        ..SolveConfig::default()
    };
    cfg.validate()?;
    let results: Vec<Result<std::result::Result<BenchRow, (usize, u64)>>> = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let seed = params.seed.wrapping_add(t as u64);
            let n = seeded_range(seed, lo, hi);
            if n > params.oracle_max_n {
                return Ok(Err((n, seed)));
            }
            let inst = generate(&GenParams {
                n,
                density: params.density,
                max_cost: params.max_cost,
                max_profit: params.max_profit,
                limit_frac: params.limit_frac.clone(),
                seed,
            })?;
            let opt = exact_qkp(&inst, params.oracle_max_n)?.total_profit;
            let (sol, report) = solve(
                &inst,
                &SolveConfig {
                    seed,
                    ..cfg.clone()
                },
            )?;
            let ratio = if opt.is_zero() {
                Rational::from_integer(1.into())
            } else {
                &sol.total_profit / &opt
            };
            debug_assert!(!ratio.is_negative());
            Ok(Ok(BenchRow {
                n,
                seed,
                opt,
                alg: sol.total_profit,
                ratio,
                floor: guaranteed_floor(n),
                winning_class: report.winning_class(),
            }))
        })
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r? {
            Ok(row) => rows.push(row),
            Err(s) => skipped.push(s),
        }
    }
    rows.sort_by_key(|r| (r.n, r.seed));
    skipped.sort_unstable();
    Ok(BenchReport {
        dks: params.dks,
        rows,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials() {
        let r = run_bench(&BenchParams {
            trials: 0,
            ..BenchParams::default()
        })
        .unwrap();
        assert!(r.rows.is_empty() && r.skipped.is_empty());
        assert!(r.mean_ratio().is_none());
    }

    #[test]
    fn oversize_trials_are_skipped() {
        let r = run_bench(&BenchParams {
            trials: 3,
            n_range: (30, 32),
            oracle_max_n: 22,
            ..BenchParams::default()
        })
        .unwrap();
        assert!(r.rows.is_empty());
        assert_eq!(r.skipped.len(), 3);
    }

    #[test]
    fn rows_sorted_and_above_floor() {
        let r = run_bench(&BenchParams {
            trials: 12,
            n_range: (3, 9),
            ..BenchParams::default()
        })
        .unwrap();
        assert_eq!(r.rows.len(), 12);
        assert!(r
            .rows
            .windows(2)
            .all(|w| (w[0].n, w[0].seed) <= (w[1].n, w[1].seed)));
        assert!(r.floor_violations().is_empty());
        assert!(r.to_table().lines().count() == 13);
    }
}
