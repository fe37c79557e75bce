//! Multiple-objective local search descent over the substring-reversal
//! neighborhood.
//!
//! Starting from one random chromosome, the search repeatedly picks a random
//! archive member whose neighborhood has not been explored yet, evaluates
//! every reversal of one of its substrings and offers each neighbor to the
//! archive. It stops once every current member has been explored. A member
//! evicted from the archive loses its explored mark, so if the same
//! chromosome is accepted again later it is explored again.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoding::{decode, random_chromosome, Chromosome};
use crate::error::Result;
use crate::model::Instance;
use crate::pareto::{Archive, ArchiveEntry, Insertion};
use crate::record::{Algorithm, RunRecord};

/// Number of neighbors of a chromosome with `n` genes: `n(n-1)/2`.
pub fn neighborhood_size(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Every chromosome obtained by reversing `genes[i..=j]` for `i < j`, in
/// lexicographic `(i, j)` order.
pub fn reversal_neighborhood(c: &Chromosome) -> impl Iterator<Item = Chromosome> + '_ {
    let n = c.len();
    (0..n).flat_map(move |i| {
        (i + 1..n).map(move |j| {
            let mut genes = c.genes().to_vec();
            genes[i..=j].reverse();
            Chromosome::from_permutation(genes)
        })
    })
}

/// Unexplored flags over archive insertion ids. Archive order follows id
/// order, so the k-th set flag is the k-th unexplored member.
#[derive(Debug, Default)]
struct PendingSet {
    flags: Vec<bool>,
    tree: Vec<u32>,
    count: usize,
}

impl PendingSet {
    fn add(&mut self, i: usize, delta: i64) {
        let mut k = i + 1;
        while k <= self.tree.len() {
            self.tree[k - 1] = (i64::from(self.tree[k - 1]) + delta) as u32;
            k += k & k.wrapping_neg();
        }
    }

    fn grow(&mut self, need: usize) {
        let size = need.next_power_of_two().max(64);
        self.flags.resize(size, false);
        // Linear Fenwick rebuild.
        self.tree = self.flags.iter().map(|&f| u32::from(f)).collect();
        for k in 1..=size {
            let parent = k + (k & k.wrapping_neg());
            if parent <= size {
                self.tree[parent - 1] += self.tree[k - 1];
            }
        }
    }

    fn set(&mut self, id: u64, on: bool) {
        let i = id as usize;
        if i >= self.flags.len() {
            self.grow(i + 1);
        }
        if self.flags[i] != on {
            self.flags[i] = on;
            self.add(i, if on { 1 } else { -1 });
            if on {
                self.count += 1;
            } else {
                self.count -= 1;
            }
        }
    }

    /// Id of the `k`-th (0-based) set flag; requires `k < count`.
    fn nth(&self, mut k: usize) -> u64 {
        let mut pos = 0;
        let mut step = self.tree.len();
        while step > 0 {
            let next = pos + step;
            if next <= self.tree.len() && (self.tree[next - 1] as usize) <= k {
                pos = next;
                k -= self.tree[next - 1] as usize;
            }
            step /= 2;
        }
        pos as u64
    }
}

pub struct Molsd<'a> {
    instance: &'a Instance,
    rng: ChaCha8Rng,
    seed: u64,
    archive: Archive,
    members: HashMap<Chromosome, u64>,
    pending: PendingSet,
    evaluations: u64,
    expansions: u64,
}

impl<'a> Molsd<'a> {
    pub fn new(instance: &'a Instance, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = random_chromosome(&mut rng, instance.len());
        let solution = decode(instance, &start)?;
        let mut archive = Archive::new();
        archive.insert(ArchiveEntry::new(start.clone(), solution));
        let id = archive.ids()[0];
        let mut pending = PendingSet::default();
        pending.set(id, true);
        Ok(Self {
            instance,
            rng,
            seed,
            archive,
            members: HashMap::from([(start, id)]),
            pending,
            evaluations: 1,
            expansions: 0,
        })
    }

    /// Explores one random unexplored member. Returns `false` when every
    /// member has been explored already.
    pub fn expand(&mut self) -> Result<bool> {
        if self.pending.count == 0 {
            return Ok(false);
        }
        let id = self.pending.nth(self.rng.random_range(0..self.pending.count));
        let pick = self.archive.index_of(id).expect("pending ids are members");
        let current = self.archive.entries()[pick].chromosome.clone();

        for neighbor in reversal_neighborhood(&current) {
            let solution = decode(self.instance, &neighbor)?;
            self.evaluations += 1;
            if let Insertion::Accepted { evicted } =
                self.archive.insert(ArchiveEntry::new(neighbor.clone(), solution))
            {
                for e in evicted {
                    if let Some(old) = self.members.remove(&e.chromosome) {
                        self.pending.set(old, false);
                    }
                }
                let new = *self.archive.ids().last().expect("just accepted");
                self.members.insert(neighbor, new);
                self.pending.set(new, true);
            }
        }
        if let Some(&still) = self.members.get(&current) {
            self.pending.set(still, false);
        }
        self.expansions += 1;
        Ok(true)
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        while self.expand()? {}
        Ok(())
    }

    pub fn archive(&self) -> &Archive {
        &self.archive
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn expansions(&self) -> u64 {
        self.expansions
    }

    pub fn into_record(self, wall_time: f64) -> RunRecord {
        RunRecord {
            instance: self.instance.name().to_string(),
            algorithm: Algorithm::Molsd,
            seed: self.seed,
            config: None,
            evaluations: self.evaluations,
            iterations: self.expansions,
            wall_time,
            archive: RunRecord::archive_entries(&self.archive),
            error: None,
        }
    }
}

pub fn molsd_run(instance: &Instance, seed: u64) -> Result<RunRecord> {
    let start = Instant::now();
    let mut search = Molsd::new(instance, seed)?;
    search.run_to_end()?;
    Ok(search.into_record(start.elapsed().as_secs_f64()))
}
