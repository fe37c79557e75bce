use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{obx, pmx, select_parent, swap_mutation, uobx, CrossoverKind, GaConfig};
use crate::encoding::{decode, random_chromosome, Chromosome};
use crate::error::{Error, Result};
use crate::model::{CanonicalRoutes, Instance, Objectives, Solution};
use crate::pareto::{dominates, fitness, xi_counts, Archive, ArchiveEntry};
use crate::record::RunRecord;

#[derive(Debug, Clone)]
pub struct Member {
    pub chromosome: Chromosome,
    pub solution: Solution,
    /// Number of current members dominating this one.
    pub xi: usize,
}

/// What one iteration did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepReport {
    /// Children decoded and evaluated (genotype duplicates are not).
    pub evaluated: usize,
    /// Children that replaced a member.
    pub accepted: usize,
    /// Some accepted child is nondominated in the population.
    pub improved: bool,
}

/// A running steady-state GA.
///
/// Each iteration draws two distinct parents by roulette over the fitness,
/// recombines them, mutates both children and offers each child to the
/// population. A child whose genes or routes already occur in the population
/// is rejected. Otherwise it replaces the member with the highest domination
/// count, provided its own count is strictly lower; counts of the remaining
/// members are then adjusted for the swap. Every evaluated child is offered
/// to the run's nondominated archive.
pub struct GaState<'a> {
    instance: &'a Instance,
    config: GaConfig,
    rng: ChaCha8Rng,
    members: Vec<Member>,
    fitness: Vec<f64>,
    genotypes: HashSet<Chromosome>,
    phenotypes: HashSet<CanonicalRoutes>,
    archive: Archive,
    evaluations: u64,
    iterations: u64,
    stagnation: u64,
    history: Option<Vec<(Chromosome, Objectives)>>,
}

impl<'a> GaState<'a> {
    pub fn new(instance: &'a Instance, config: GaConfig) -> Result<Self> {
        Self::init(instance, config, false)
    }

    /// Like [`GaState::new`], additionally logging every evaluated
    /// chromosome and its objectives.
    pub fn with_history(instance: &'a Instance, config: GaConfig) -> Result<Self> {
        Self::init(instance, config, true)
    }

    fn init(instance: &'a Instance, config: GaConfig, history: bool) -> Result<Self> {
        config.validate()?;
        let mut state = Self {
            instance,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            members: Vec::with_capacity(config.pop_size),
            fitness: Vec::with_capacity(config.pop_size),
            genotypes: HashSet::with_capacity(config.pop_size),
            phenotypes: HashSet::with_capacity(config.pop_size),
            archive: Archive::new(),
            evaluations: 0,
            iterations: 0,
            stagnation: 0,
            history: history.then(Vec::new),
            config,
        };

        let wanted = state.config.pop_size;
        let max_draws = 100 * wanted;
        let mut draws = 0;
        while state.members.len() < wanted {
            if draws == max_draws {
                return Err(Error::PopulationExhausted {
                    wanted,
                    draws: max_draws,
                });
            }
            draws += 1;
            let chromosome = random_chromosome(&mut state.rng, instance.len());
            if state.genotypes.contains(&chromosome) {
                continue;
            }
            let solution = state.evaluate(&chromosome)?;
            let key = solution.canonical();
            if state.phenotypes.contains(&key) {
                continue;
            }
            state.genotypes.insert(chromosome.clone());
            state.phenotypes.insert(key);
            state.members.push(Member {
                chromosome,
                solution,
                xi: 0,
            });
        }

        let objectives: Vec<Objectives> = state.members.iter().map(|m| m.solution.objectives).collect();
        for (m, xi) in state.members.iter_mut().zip(xi_counts(&objectives)) {
            m.xi = xi;
        }
        state.refresh_fitness();
        Ok(state)
    }

    fn evaluate(&mut self, chromosome: &Chromosome) -> Result<Solution> {
        let solution = decode(self.instance, chromosome)?;
        self.evaluations += 1;
        if let Some(h) = self.history.as_mut() {
            h.push((chromosome.clone(), solution.objectives));
        }
        self.archive
            .insert(ArchiveEntry::new(chromosome.clone(), solution.clone()));
        Ok(solution)
    }

    fn refresh_fitness(&mut self) {
        let xi_max = self.members.iter().map(|m| m.xi).max().unwrap_or(0);
        let (f_min, f_max) = (self.config.f_min, self.config.f_max);
        self.fitness.clear();
        self.fitness
            .extend(self.members.iter().map(|m| fitness(m.xi, xi_max, f_min, f_max)));
    }

    fn crossover(&mut self, a: usize, b: usize) -> (Chromosome, Chromosome) {
        let p1 = &self.members[a].chromosome;
        let p2 = &self.members[b].chromosome;
        if self.rng.random::<f64>() >= self.config.p_cross {
            return (p1.clone(), p2.clone());
        }
        match self.config.crossover {
            CrossoverKind::Pmx => pmx(&mut self.rng, p1, p2),
            CrossoverKind::Obx => obx(&mut self.rng, p1, p2),
            CrossoverKind::Uobx => uobx(&mut self.rng, p1, p2),
        }
    }

    /// Runs one iteration.
    pub fn step(&mut self) -> Result<StepReport> {
        let first = select_parent(&mut self.rng, &self.fitness);
        let second = loop {
            let k = select_parent(&mut self.rng, &self.fitness);
            if k != first {
                break k;
            }
        };
        let (c1, c2) = self.crossover(first, second);
        let c1 = swap_mutation(&mut self.rng, c1, self.config.p_mut);
        let c2 = swap_mutation(&mut self.rng, c2, self.config.p_mut);

        let mut report = StepReport::default();
        for child in [c1, c2] {
            if self.genotypes.contains(&child) {
                continue;
            }
            let solution = self.evaluate(&child)?;
            report.evaluated += 1;
            if let Some(xi) = self.offer(child, solution) {
                report.accepted += 1;
                report.improved |= xi == 0;
            }
        }

        self.iterations += 1;
        if report.improved {
            self.stagnation = 0;
        } else {
            self.stagnation += 1;
        }
        Ok(report)
    }

    /// Inserts the child in place of the worst member if it is strictly
    /// better ranked. Returns the child's domination count once inserted.
    fn offer(&mut self, chromosome: Chromosome, solution: Solution) -> Option<usize> {
        let key = solution.canonical();
        if self.phenotypes.contains(&key) {
            return None;
        }
        let g = solution.objectives;
        let xi = self
            .members
            .iter()
            .filter(|m| dominates(&m.solution.objectives, &g))
            .count();
        let (worst, worst_xi) = self
            .members
            .iter()
            .enumerate()
            .fold((0, 0), |(wi, wx), (i, m)| if m.xi > wx { (i, m.xi) } else { (wi, wx) });
        if xi >= worst_xi {
            return None;
        }

        let evicted = self.members[worst].solution.objectives;
        for (i, m) in self.members.iter_mut().enumerate() {
            if i == worst {
                continue;
            }
            let h = &m.solution.objectives;
            if dominates(&evicted, h) {
                m.xi -= 1;
            }
            if dominates(&g, h) {
                m.xi += 1;
            }
        }
        let xi = xi - usize::from(dominates(&evicted, &g));

        let old = std::mem::replace(
            &mut self.members[worst],
            Member {
                chromosome: chromosome.clone(),
                solution,
                xi,
            },
        );
        self.genotypes.remove(&old.chromosome);
        self.phenotypes.remove(&old.solution.canonical());
        self.genotypes.insert(chromosome);
        self.phenotypes.insert(key);
        self.refresh_fitness();
        Some(xi)
    }

    pub fn is_finished(&self) -> bool {
        self.stagnation >= self.config.stagnation_limit
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(())
    }

    pub fn config(&self) -> &GaConfig {
        &self.config
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn stagnation(&self) -> u64 {
        self.stagnation
    }

    /// Every evaluated chromosome in evaluation order, when enabled.
    pub fn history(&self) -> Option<&[(Chromosome, Objectives)]> {
        self.history.as_deref()
    }

    pub fn into_record(self, wall_time: f64) -> RunRecord {
        RunRecord {
            instance: self.instance.name().to_string(),
            algorithm: self.config.algorithm(),
            seed: self.config.seed,
            evaluations: self.evaluations,
            iterations: self.iterations,
            wall_time,
            archive: RunRecord::archive_entries(&self.archive),
            error: None,
            config: Some(self.config),
        }
    }
}

/// Runs the GA until the stagnation limit is reached.
pub fn ga_run(instance: &Instance, config: GaConfig) -> Result<RunRecord> {
    let start = Instant::now();
    let mut state = GaState::new(instance, config)?;
    state.run_to_end()?;
    Ok(state.into_record(start.elapsed().as_secs_f64()))
}
