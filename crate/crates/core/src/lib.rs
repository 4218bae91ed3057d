//! Approximation solver for the quadratic knapsack problem.
//!
//! An instance is pruned, its edge profits rounded to powers of two and its
//! vertices bucketed by cost. The rounded profit mass is then split into
//! structured sub-instances (a plain knapsack over vertex profits plus four
//! edge classes keyed by cost bucket and profit level). Each sub-instance is
//! solved by a knapsack FPTAS, degree-greedy selection or a pluggable
//! densest-k-subgraph backend, and the best candidate on the original
//! instance is returned.

pub mod bench;
pub mod classes;
pub mod decompose;
pub mod dks;
pub mod error;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod knapsack;
pub mod oracle;
pub mod preprocess;
pub mod rational;
pub mod solver;

pub use dks::{DksBackend, DksChoice};
pub use error::{QkpError, Result};
pub use instance::{evaluate, is_feasible, validate, QkpInstance, Solution};
pub use rational::Rational;
pub use solver::{guaranteed_floor, solve, RunReport, SolveConfig};
