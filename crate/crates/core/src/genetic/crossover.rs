//! Permutation crossovers. Each operator has a randomized entry point and a
//! deterministic core taking the drawn cut points or mask.

use rand::Rng;

use crate::encoding::Chromosome;
use crate::model::CustomerId;

/// Partially mapped crossover with two random cut points.
///
/// Needs at least three genes to place two distinct interior cuts; shorter
/// parents are returned unchanged.
pub fn pmx<R: Rng + ?Sized>(rng: &mut R, p1: &Chromosome, p2: &Chromosome) -> (Chromosome, Chromosome) {
    let n = p1.len();
    if n < 3 {
        return (p1.clone(), p2.clone());
    }
    let a = rng.random_range(1..n);
    let mut b = rng.random_range(1..n - 1);
    if b >= a {
        b += 1;
    }
    pmx_with_cuts(p1, p2, a.min(b), a.max(b))
}

/// PMX on the segment `lo..hi`: each child takes the other parent's segment
/// and keeps its own genes elsewhere, resolving clashes through the
/// positional mapping of the segment.
pub fn pmx_with_cuts(p1: &Chromosome, p2: &Chromosome, lo: usize, hi: usize) -> (Chromosome, Chromosome) {
    assert_eq!(p1.len(), p2.len(), "parents differ in length");
    assert!(lo <= hi && hi <= p1.len(), "cut points out of range");
    (
        Chromosome::from_permutation(pmx_child(p1.genes(), p2.genes(), lo, hi)),
        Chromosome::from_permutation(pmx_child(p2.genes(), p1.genes(), lo, hi)),
    )
}

fn pmx_child(base: &[CustomerId], donor: &[CustomerId], lo: usize, hi: usize) -> Vec<CustomerId> {
    // segment_pos[g] = index of gene g inside the donor's segment
    let mut segment_pos = vec![usize::MAX; base.len() + 1];
    for i in lo..hi {
        segment_pos[donor[i]] = i;
    }
    let mut child = base.to_vec();
    child[lo..hi].copy_from_slice(&donor[lo..hi]);
    for i in (0..lo).chain(hi..base.len()) {
        let mut g = base[i];
        while segment_pos[g] != usize::MAX {
            g = base[segment_pos[g]];
        }
        child[i] = g;
    }
    child
}

fn random_mask<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.random::<bool>()).collect()
}

/// Order-based crossover with each position selected with probability 1/2.
pub fn obx<R: Rng + ?Sized>(rng: &mut R, p1: &Chromosome, p2: &Chromosome) -> (Chromosome, Chromosome) {
    let mask = random_mask(rng, p1.len());
    obx_with_mask(p1, p2, &mask)
}

/// Order-based crossover on the selected positions.
///
/// For the first child, the genes the second parent holds at the selected
/// positions keep their places in the first parent's string but are rewritten
/// in the order the second parent lists them. The second child swaps roles.
pub fn obx_with_mask(p1: &Chromosome, p2: &Chromosome, selected: &[bool]) -> (Chromosome, Chromosome) {
    assert_eq!(p1.len(), p2.len(), "parents differ in length");
    assert_eq!(selected.len(), p1.len(), "mask length");
    (
        Chromosome::from_permutation(impose_order(p1.genes(), p2.genes(), selected)),
        Chromosome::from_permutation(impose_order(p2.genes(), p1.genes(), selected)),
    )
}

fn impose_order(base: &[CustomerId], other: &[CustomerId], selected: &[bool]) -> Vec<CustomerId> {
    let mut picked = vec![false; base.len() + 1];
    let order: Vec<CustomerId> = other
        .iter()
        .zip(selected)
        .filter(|(_, &s)| s)
        .map(|(&g, _)| g)
        .collect();
    for &g in &order {
        picked[g] = true;
    }
    let mut next = order.into_iter();
    base.iter()
        .map(|&g| if picked[g] { next.next().expect("one slot per picked gene") } else { g })
        .collect()
}

/// Uniform order-based crossover with a uniform random binary mask.
pub fn uobx<R: Rng + ?Sized>(rng: &mut R, p1: &Chromosome, p2: &Chromosome) -> (Chromosome, Chromosome) {
    let mask = random_mask(rng, p1.len());
    uobx_with_mask(p1, p2, &mask)
}

/// Uniform order-based crossover: the first child keeps the first parent's
/// genes where the mask is set and fills the remaining positions with the
/// missing genes in the order they appear in the second parent. The second
/// child swaps roles.
pub fn uobx_with_mask(p1: &Chromosome, p2: &Chromosome, keep: &[bool]) -> (Chromosome, Chromosome) {
    assert_eq!(p1.len(), p2.len(), "parents differ in length");
    assert_eq!(keep.len(), p1.len(), "mask length");
    (
        Chromosome::from_permutation(keep_and_fill(p1.genes(), p2.genes(), keep)),
        Chromosome::from_permutation(keep_and_fill(p2.genes(), p1.genes(), keep)),
    )
}

fn keep_and_fill(base: &[CustomerId], other: &[CustomerId], keep: &[bool]) -> Vec<CustomerId> {
    let mut kept = vec![false; base.len() + 1];
    for (&g, &k) in base.iter().zip(keep) {
        kept[g] |= k;
    }
    let mut fill = other.iter().copied().filter(|&g| !kept[g]);
    base.iter()
        .zip(keep)
        .map(|(&g, &k)| if k { g } else { fill.next().expect("one filler per open slot") })
        .collect()
}
