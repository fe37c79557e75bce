//! Multi-objective vehicle routing with soft time windows.
//!
//! Solutions are giant-tour permutations cut into routes by a greedy
//! decoder and scored on four objectives: total route time, number of
//! routes, total window violation and number of violated windows. Two
//! solvers search the Pareto front: a steady-state genetic algorithm with
//! Pareto-rank fitness and a multi-objective local search over substring
//! reversals. The harness runs seeded campaigns of both and scores them
//! against pooled reference fronts.

pub mod encoding;
pub mod error;
pub mod genetic;
pub mod harness;
pub mod instances;
pub mod metrics;
pub mod model;
pub mod molsd;
pub mod pareto;
pub mod record;

pub use encoding::{decode, Chromosome};
pub use error::{Error, Result};
pub use instances::{GenParams, InstanceSpec};
pub use model::{evaluate, Instance, Objectives, Solution};
pub use record::{Algorithm, RunRecord};
