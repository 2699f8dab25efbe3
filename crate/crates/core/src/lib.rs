//! RIME and MRIME-CD population-based optimizers.
//!
//! The crate is organised bottom-up:
//!
//! * [`space`], [`population`], [`budget`], [`rng`], [`objective`] and [`record`]
//!   hold the shared domain types every optimizer consumes.
//! * [`rime`] implements the basic soft-rime / hard-rime search with positive
//!   greedy selection.
//! * [`linalg`] provides the weighted Gaussian model (log-rank weights, scatter
//!   covariance, jittered Cholesky, multivariate normal sampling).
//! * [`mrime`] adds covariance learning, average bootstrapping and the
//!   stagnation-triggered diversity restart, plus the ablation variants.
//! * [`suite`] generates seeded shifted/rotated benchmark instances.
//! * [`constrained`] has the engineering design problems and the penalty transform.
//! * [`stats`] holds the Friedman, rank-sum and Kruskal-Wallis tests used to
//!   compare algorithms.
//!
//! All optimizers minimize.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod constrained;
pub mod error;
pub mod linalg;
pub mod mrime;
pub mod objective;
pub mod population;
pub mod record;
pub mod rime;
pub mod rng;
pub mod space;
pub mod stats;
pub mod suite;

pub use budget::Budget;
pub use error::{Error, Result};
pub use mrime::{make_variant, run_mrime_cd, MrimeParams, Optimizer, StrategyFlags, Variant};
pub use objective::{evaluate, Objective};
pub use population::{initialize_population, Agent, Population};
pub use record::{ConvergencePoint, RunRecord};
pub use rime::{run_rime, RimeParams};
pub use rng::RngStream;
pub use space::SearchSpace;
