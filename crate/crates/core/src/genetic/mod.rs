//! Steady-state genetic algorithm with Pareto-rank fitness.

mod crossover;
mod engine;
mod mutation;
mod selection;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::Algorithm;

pub use crossover::{obx, obx_with_mask, pmx, pmx_with_cuts, uobx, uobx_with_mask};
pub use engine::{ga_run, GaState, Member, StepReport};
pub use mutation::swap_mutation;
pub use selection::select_parent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossoverKind {
    #[serde(rename = "PMX")]
    Pmx,
    #[serde(rename = "OBX")]
    Obx,
    #[serde(rename = "UOBX")]
    Uobx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub pop_size: usize,
    pub p_cross: f64,
    /// Swap mutation probability per individual.
    pub p_mut: f64,
    pub crossover: CrossoverKind,
    /// Consecutive iterations without a new nondominated member before the
    /// run stops.
    pub stagnation_limit: u64,
    pub f_min: f64,
    pub f_max: f64,
    pub seed: u64,
}

impl GaConfig {
    pub const DEFAULT_POP_SIZE: usize = 500;
    pub const DEFAULT_STAGNATION: u64 = 10_000;
    pub const SWAP_MUTATION_P: f64 = 0.1;

    /// Crossover-only configuration with the study's defaults.
    pub fn new(crossover: CrossoverKind, seed: u64) -> Self {
        Self {
            pop_size: Self::DEFAULT_POP_SIZE,
            p_cross: 1.0,
            p_mut: 0.0,
            crossover,
            stagnation_limit: Self::DEFAULT_STAGNATION,
            f_min: 1.0,
            f_max: 100.0,
            seed,
        }
    }

    /// Configuration for one of the GA variants; `None` for the local search.
    pub fn for_algorithm(algorithm: Algorithm, seed: u64) -> Option<Self> {
        let cfg = match algorithm {
            Algorithm::Molsd => return None,
            Algorithm::Pmx => Self::new(CrossoverKind::Pmx, seed),
            Algorithm::Obx => Self::new(CrossoverKind::Obx, seed),
            Algorithm::Uobx => Self::new(CrossoverKind::Uobx, seed),
            Algorithm::UobxSwap => Self {
                p_mut: Self::SWAP_MUTATION_P,
                ..Self::new(CrossoverKind::Uobx, seed)
            },
        };
        Some(cfg)
    }

    pub fn algorithm(&self) -> Algorithm {
        match self.crossover {
            CrossoverKind::Pmx => Algorithm::Pmx,
            CrossoverKind::Obx => Algorithm::Obx,
            CrossoverKind::Uobx if self.p_mut > 0.0 => Algorithm::UobxSwap,
            CrossoverKind::Uobx => Algorithm::Uobx,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probability = |p: f64| (0.0..=1.0).contains(&p);
        if !probability(self.p_cross) || !probability(self.p_mut) {
            return Err(Error::Config("probabilities must lie in [0, 1]".into()));
        }
        if self.pop_size < 2 {
            return Err(Error::Config("population size must be at least 2".into()));
        }
        if self.stagnation_limit < 1 {
            return Err(Error::Config("stagnation limit must be at least 1".into()));
        }
        if !(self.f_max > self.f_min && self.f_min > 0.0) {
            return Err(Error::Config("fitness bounds need 0 < f_min < f_max".into()));
        }
        Ok(())
    }
}
