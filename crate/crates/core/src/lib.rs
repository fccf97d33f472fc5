//! Distributed random projected proximal and subgradient methods.
//!
//! A network of users cooperatively minimizes `sum_i f_i(x)` over the
//! intersection of all users' constraint sets. Each user knows only its own
//! weighted L1 objective and its own collection of Euclidean balls, talks
//! to its neighbors through a doubly stochastic mixing matrix, and projects
//! onto a single randomly drawn ball per iteration.
//!
//! Modules, bottom up:
//!
//! - [`convex_ops`]: weighted L1 objectives, balls, step-size schedules.
//! - [`network`]: topologies, mixing weights, connectivity.
//! - [`sampler`]: reproducible random streams and the constraint draw.
//! - [`algorithms`]: the two round engines and the run loop.
//! - [`metrics`]: per-user feasibility and objective measures.
//! - [`harness`]: instance generation, Monte-Carlo runs, the reference
//!   solver and CSV/JSON output.
//!
//! The `examples/` directory of this crate has one runnable program per
//! capability; `cargo run --example` lists them.

pub mod algorithms;
pub mod convex_ops;
mod error;
pub mod harness;
pub mod metrics;
pub mod network;
pub mod sampler;

pub use algorithms::{AlgorithmKind, AlgorithmState, ProblemInstance, RunOptions, Trajectory};
pub use convex_ops::{Ball, StepSizeSchedule, WeightedL1};
pub use error::{Error, Result};
pub use harness::ExperimentConfig;
pub use metrics::MetricsRecord;
pub use network::{Topology, WeightMatrix};
