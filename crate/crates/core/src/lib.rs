//! One-pass streaming maximization of monotone submodular set functions under a
//! `d`-knapsack constraint.
//!
//! The crate is organised bottom-up:
//!
//! * [`objective`]: set-function oracles with call counting, plus reference families and
//!   a randomized monotonicity/submodularity checker.
//! * [`knapsack`]: the `d`-knapsack constraint, its standardized form and big-element tests.
//! * [`solvers`]: the threshold ("sieve") streaming algorithms and their instrumentation.
//! * [`bounds`]: a-priori and data-dependent upper bounds on the optimum.
//! * [`baselines`]: exhaustive search, greedy variants and biased PageRank.
//! * [`decomposable`]: averaged objectives evaluated on a reservoir sample.
//! * [`applications`]: news and citation-network recommendation objectives.
//! * [`formats`] and [`synth`]: file formats and seeded synthetic data generators.

pub mod applications;
pub mod baselines;
pub mod bounds;
pub mod decomposable;
pub mod error;
pub mod formats;
pub mod knapsack;
pub mod objective;
pub mod solvers;
pub mod synth;

pub use error::{Error, Result};
pub use knapsack::{KnapsackInstance, StandardizedInstance};
pub use objective::{Objective, SetFunction};
pub use solvers::{Solution, SolveMetrics, StreamConfig};
