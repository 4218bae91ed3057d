//! Seeded random instance generator.

use num::{BigInt, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QkpError, Result};
use crate::instance::QkpInstance;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n: usize,
    /// Independent probability of each vertex pair being an edge.
    pub density: f64,
    /// Costs are uniform integers in `1..=max_cost`.
    pub max_cost: u64,
    /// Vertex profits are uniform in `0..=max_profit`, edge profits in
    /// `1..=max_profit`.
    pub max_profit: u64,
    /// `limit = limit_frac * total cost`.
    pub limit_frac: Rational,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 10,
            density: 0.5,
            max_cost: 10,
            max_profit: 10,
            limit_frac: Rational::new(1.into(), 2.into()),
            seed: 0,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.density) {
            return Err(QkpError::Input(format!(
                "density must lie in [0, 1], got {}",
                self.density
            )));
        }
        if self.max_cost == 0 {
            return Err(QkpError::Input("max cost must be at least 1".into()));
        }
        if self.max_profit == 0 {
            return Err(QkpError::Input("max profit must be at least 1".into()));
        }
        if self.limit_frac.is_negative() {
            return Err(QkpError::Input(format!(
                "limit fraction must be non-negative, got {}",
                self.limit_frac
            )));
        }
        Ok(())
    }
}

pub fn generate(params: &GenParams) -> Result<QkpInstance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n;
    let costs: Vec<Rational> = (0..n)
        .map(|_| Rational::from_integer(BigInt::from(rng.gen_range(1..=params.max_cost))))
        .collect();
    let vertex_profits: Vec<Rational> = (0..n)
        .map(|_| Rational::from_integer(BigInt::from(rng.gen_range(0..=params.max_profit))))
        .collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(params.density) {
                let p = rng.gen_range(1..=params.max_profit);
                edges.push((u, v, Rational::from_integer(BigInt::from(p))));
            }
        }
    }
    let total: Rational = costs.iter().sum();
    QkpInstance::new(costs, vertex_profits, edges, total * &params.limit_frac)
}

/// Uniform integer in `lo..=hi` drawn from a generator seeded with `seed`.
pub fn seeded_range(seed: u64, lo: usize, hi: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    rng.gen_range(lo..=hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_bytes() {
        let p = GenParams {
            n: 10,
            density: 0.5,
            seed: 7,
            ..GenParams::default()
        };
        let a = generate(&p).unwrap().to_canonical_json();
        let b = generate(&p).unwrap().to_canonical_json();
        assert_eq!(a, b);
        let other = generate(&GenParams { seed: 8, ..p })
            .unwrap()
            .to_canonical_json();
        assert_ne!(a, other);
    }

    #[test]
    fn density_extremes() {
        let none = generate(&GenParams {
            n: 9,
            density: 0.0,
            ..GenParams::default()
        })
        .unwrap();
        assert!(none.edges().is_empty());
        let full = generate(&GenParams {
            n: 9,
            density: 1.0,
            ..GenParams::default()
        })
        .unwrap();
        assert_eq!(full.edges().len(), 36);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(generate(&GenParams {
            density: 1.5,
            ..GenParams::default()
        })
        .is_err());
        assert!(generate(&GenParams {
            max_cost: 0,
            ..GenParams::default()
        })
        .is_err());
    }
}
