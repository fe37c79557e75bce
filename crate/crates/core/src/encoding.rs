//! Giant-tour encoding: a permutation of all customers, cut into routes by a
//! greedy decoder that never violates the duration or capacity limits.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{closing_time, CustomerId, Instance, Route, Solution};

/// A permutation of the customer ids `1..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chromosome(Vec<CustomerId>);

impl Chromosome {
    pub fn new(genes: Vec<CustomerId>) -> Result<Self> {
        let n = genes.len();
        let mut seen = vec![false; n + 1];
        for &g in &genes {
            if g == 0 || g > n {
                return Err(Error::InvalidChromosome(format!(
                    "gene {g} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[g], true) {
                return Err(Error::InvalidChromosome(format!("gene {g} repeated")));
            }
        }
        Ok(Self(genes))
    }

    /// Wraps genes already known to form a permutation.
    pub(crate) fn from_permutation(genes: Vec<CustomerId>) -> Self {
        debug_assert!(is_permutation(&genes));
        Self(genes)
    }

    pub fn identity(n: usize) -> Self {
        Self((1..=n).collect())
    }

    pub fn genes(&self) -> &[CustomerId] {
        &self.0
    }

    pub fn into_genes(self) -> Vec<CustomerId> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// True iff `genes` holds each of `1..=len` exactly once.
pub fn is_permutation(genes: &[CustomerId]) -> bool {
    let n = genes.len();
    let mut seen = vec![false; n + 1];
    genes
        .iter()
        .all(|&g| g >= 1 && g <= n && !std::mem::replace(&mut seen[g], true))
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for g in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Chromosome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let genes = s
            .split_whitespace()
            .map(|t| {
                t.parse::<CustomerId>()
                    .map_err(|_| Error::InvalidChromosome(format!("{t:?} is not a gene")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(genes)
    }
}

/// Uniformly random permutation of `1..=n` (Fisher-Yates).
pub fn random_chromosome<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Chromosome {
    let mut genes: Vec<CustomerId> = (1..=n).collect();
    genes.shuffle(rng);
    Chromosome(genes)
}

/// Splits the gene string into routes.
///
/// Genes are scanned left to right. The next customer joins the current route
/// as long as the extended route, including its return to the depot, still
/// ends within the horizon and its load stays within capacity; otherwise the
/// route is closed and a new one starts with that customer.
pub fn decode(instance: &Instance, chromosome: &Chromosome) -> Result<Solution> {
    if chromosome.len() != instance.len() {
        return Err(Error::InvalidChromosome(format!(
            "{} genes for {} customers",
            chromosome.len(),
            instance.len()
        )));
    }
    let routes = split(instance, chromosome.genes())?;
    Solution::evaluate(instance, routes)
}

fn split(instance: &Instance, genes: &[CustomerId]) -> Result<Vec<Route>> {
    let horizon_end = instance.depot().horizon_end;
    let horizon_start = instance.depot().horizon_start;
    let capacity = instance.capacity();

    let mut routes = Vec::new();
    let mut current: Route = Vec::new();
    let mut load = 0.0;
    // Arrival at the last customer of `current`.
    let mut arrival = 0.0;

    for &c in genes {
        if let Some(&last) = current.last() {
            let next_arrival = arrival + instance.unload_of(last) + instance.travel(last, c);
            let next_load = load + instance.demand_of(c);
            if next_load <= capacity && closing_time(instance, c, next_arrival) <= horizon_end {
                current.push(c);
                load = next_load;
                arrival = next_arrival;
                continue;
            }
            routes.push(std::mem::take(&mut current));
        }
        arrival = horizon_start + instance.travel(0, c);
        load = instance.demand_of(c);
        if closing_time(instance, c, arrival) > horizon_end || load > capacity {
            return Err(Error::UnservableCustomer(c));
        }
        current.push(c);
    }
    if !current.is_empty() {
        routes.push(current);
    }
    Ok(routes)
}
