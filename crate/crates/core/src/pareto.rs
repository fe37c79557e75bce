//! Pareto dominance, domination counts, rank-based fitness and the
//! nondominated archive.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::encoding::Chromosome;
use crate::error::{Error, Result};
use crate::model::{CanonicalRoutes, Objectives, Solution};

/// `a` dominates `b`: no worse everywhere and strictly better somewhere.
#[inline]
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    let mut strict = false;
    for (x, y) in a.0.iter().zip(&b.0) {
        if x > y {
            return false;
        }
        strict |= x < y;
    }
    strict
}

fn lex_cmp(a: &Objectives, b: &Objectives) -> Ordering {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// For every vector, the number of vectors in the list that dominate it.
///
/// A dominating vector always precedes the dominated one in lexicographic
/// order, so each vector is only compared against its lexicographic
/// predecessors.
pub fn xi_counts(vectors: &[Objectives]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&i, &j| lex_cmp(&vectors[i], &vectors[j]));
    let mut counts = vec![0; vectors.len()];
    for (pos, &i) in order.iter().enumerate() {
        counts[i] = order[..pos]
            .iter()
            .filter(|&&j| dominates(&vectors[j], &vectors[i]))
            .count();
    }
    counts
}

/// Linear fitness `f_max - xi * (f_max - f_min) / xi_max`.
///
/// When no member is dominated (`xi_max == 0`) everyone gets `f_max`.
pub fn fitness(xi: usize, xi_max: usize, f_min: f64, f_max: f64) -> f64 {
    if xi_max == 0 {
        return f_max;
    }
    f_max - xi as f64 * (f_max - f_min) / xi_max as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub chromosome: Chromosome,
    pub solution: Solution,
}

impl ArchiveEntry {
    pub fn new(chromosome: Chromosome, solution: Solution) -> Self {
        Self {
            chromosome,
            solution,
        }
    }

    pub fn objectives(&self) -> &Objectives {
        &self.solution.objectives
    }
}

/// Result of offering an entry to the archive.
#[derive(Debug, Clone, PartialEq)]
pub enum Insertion {
    /// Inserted; the listed former members were dominated by it and removed.
    Accepted { evicted: Vec<ArchiveEntry> },
    /// Rejected, dominated by the member at this index.
    DominatedBy(usize),
    /// Rejected, the member at this index is the same set of routes.
    Duplicate(usize),
}

impl Insertion {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Insertion::Accepted { .. })
    }
}

/// Order-preserving integer image of a non-NaN float (`-0.0` maps to `0.0`).
pub(crate) fn sort_key(x: f64) -> u64 {
    let bits = (x + 0.0).to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | 1 << 63
    }
}

type Buckets = BTreeMap<(u64, u64), Staircase>;

/// Id of some indexed vector dominating `g`.
fn find_dominator(buckets: &Buckets, g: &Objectives) -> Option<u64> {
    let (k1, k2, k4) = (sort_key(g.0[0]), sort_key(g.0[1]), sort_key(g.0[3]));
    for (&(b2, b4), stair) in buckets {
        if b2 > k2 || b4 > k4 {
            continue;
        }
        let Some((&s1, step)) = stair.steps.range(..=k1).next_back() else {
            continue;
        };
        let equal = b2 == k2 && b4 == k4 && s1 == k1 && step.third == g.0[2];
        if step.third <= g.0[2] && !equal {
            return Some(step.ids[0]);
        }
    }
    None
}

/// Flags the vectors to keep so that the kept ones form the nondominated
/// subset with repeats collapsed onto their first occurrence.
pub fn nondominated_mask(vectors: &[Objectives]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    // Stable, so the first of several equal vectors comes first. Nothing
    // can be dominated by a vector that sorts after it.
    order.sort_by_key(|&i| vectors[i].0.map(sort_key));
    let mut keep = vec![false; vectors.len()];
    let mut buckets = Buckets::new();
    let mut prev: Option<&Objectives> = None;
    for i in order {
        let g = &vectors[i];
        if prev == Some(g) {
            continue;
        }
        prev = Some(g);
        if find_dominator(&buckets, g).is_some() {
            continue;
        }
        keep[i] = true;
        buckets
            .entry((sort_key(g.0[1]), sort_key(g.0[3])))
            .or_default()
            .steps
            .insert(sort_key(g.0[0]), Step { third: g.0[2], ids: vec![i as u64] });
    }
    keep
}

/// Members sharing the second and fourth objective. Being mutually
/// nondominated, they form a staircase: the third objective strictly falls as
/// the first rises, and equal first values imply equal vectors.
#[derive(Debug, Clone, Default)]
struct Staircase {
    steps: BTreeMap<u64, Step>,
}

#[derive(Debug, Clone)]
struct Step {
    third: f64,
    ids: Vec<u64>,
}

/// Unbounded set of mutually nondominated solutions with distinct route sets.
///
/// Entries keep their insertion order. Dominance queries go through an index
/// that buckets members by their second and fourth objective, so a query
/// costs a logarithmic search per bucket instead of a scan of all members.
#[derive(Debug, Clone, Default)]
pub struct Archive {
    entries: Vec<ArchiveEntry>,
    ids: Vec<u64>,
    position: HashMap<u64, usize>,
    keys: HashMap<CanonicalRoutes, u64>,
    buckets: Buckets,
    next_id: u64,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    /// Insertion ids of the members, increasing in archive order.
    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    /// Current position of the member with insertion id `id`.
    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.position.get(&id).copied()
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry> {
        self.entries
    }

    pub fn objectives(&self) -> Vec<Objectives> {
        self.entries.iter().map(|e| *e.objectives()).collect()
    }

    fn dominator(&self, g: &Objectives) -> Option<u64> {
        find_dominator(&self.buckets, g)
    }

    /// Removes from the index every member `g` dominates and returns their ids.
    fn unindex_dominated(&mut self, g: &Objectives) -> Vec<u64> {
        let (k1, k2, k4) = (sort_key(g.0[0]), sort_key(g.0[1]), sort_key(g.0[3]));
        let mut out = Vec::new();
        let mut emptied = Vec::new();
        for (&(b2, b4), stair) in self.buckets.iter_mut() {
            if b2 < k2 || b4 < k4 {
                continue;
            }
            let mut doomed = Vec::new();
            for (&s1, step) in stair.steps.range(k1..) {
                if step.third < g.0[2] {
                    break;
                }
                let equal = b2 == k2 && b4 == k4 && s1 == k1 && step.third == g.0[2];
                if !equal {
                    doomed.push(s1);
                }
            }
            for s1 in doomed {
                out.extend(stair.steps.remove(&s1).expect("step exists").ids);
            }
            if stair.steps.is_empty() {
                emptied.push((b2, b4));
            }
        }
        for b in emptied {
            self.buckets.remove(&b);
        }
        out
    }

    pub fn insert(&mut self, entry: ArchiveEntry) -> Insertion {
        let g = *entry.objectives();
        if let Some(id) = self.dominator(&g) {
            return Insertion::DominatedBy(self.position[&id]);
        }
        let key = entry.solution.canonical();
        if let Some(id) = self.keys.get(&key) {
            return Insertion::Duplicate(self.position[id]);
        }

        let doomed: HashSet<u64> = self.unindex_dominated(&g).into_iter().collect();
        let mut evicted = Vec::with_capacity(doomed.len());
        if !doomed.is_empty() {
            let mut kept = Vec::with_capacity(self.entries.len() + 1);
            let mut kept_ids = Vec::with_capacity(self.entries.len() + 1);
            for (e, id) in self.entries.drain(..).zip(self.ids.drain(..)) {
                if doomed.contains(&id) {
                    self.keys.remove(&e.solution.canonical());
                    evicted.push(e);
                } else {
                    kept.push(e);
                    kept_ids.push(id);
                }
            }
            self.entries = kept;
            self.ids = kept_ids;
            self.position = self.ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
        }

        let id = self.next_id;
        self.next_id += 1;
        self.buckets
            .entry((sort_key(g.0[1]), sort_key(g.0[3])))
            .or_default()
            .steps
            .entry(sort_key(g.0[0]))
            .or_insert_with(|| Step {
                third: g.0[2],
                ids: Vec::new(),
            })
            .ids
            .push(id);
        self.keys.insert(key, id);
        self.position.insert(id, self.entries.len());
        self.ids.push(id);
        self.entries.push(entry);
        Insertion::Accepted { evicted }
    }

    /// One line per entry: the four objective values, ` : `, then the genes.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            writeln!(out, "{} : {}", e.objectives(), e.chromosome).unwrap();
        }
        out
    }
}

/// Parses one exported archive or front line: four objective values, then
/// optional provenance (for archive lines, ` : ` and the genes).
pub fn parse_vector_line(line: &str, line_no: usize) -> Result<(Objectives, String)> {
    let mut tokens = line.split_whitespace();
    let mut v = [0.0_f64; 4];
    for (k, slot) in v.iter_mut().enumerate() {
        let tok = tokens.next().ok_or_else(|| Error::FrontParse {
            line: line_no,
            message: format!("expected 4 objective values, found {k}"),
        })?;
        *slot = tok.parse().map_err(|_| Error::FrontParse {
            line: line_no,
            message: format!("{tok:?} is not a number"),
        })?;
        if !slot.is_finite() {
            return Err(Error::FrontParse {
                line: line_no,
                message: format!("{tok:?} is not finite"),
            });
        }
    }
    let rest: Vec<&str> = tokens.collect();
    Ok((Objectives(v), rest.join(" ")))
}
