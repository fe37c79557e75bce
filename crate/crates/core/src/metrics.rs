//! Distance of an approximation front to a reference front.
//!
//! Objectives are weighted by the inverse of their spread over the reference
//! front. The distance from an approximation point `x` to a reference point
//! `y` is the largest weighted excess `max(0, max_j w_j (x_j - y_j))`; `d1`
//! averages, over the reference points, the distance to the closest
//! approximation point and `d2` takes the worst case.

use std::collections::BTreeMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::model::Objectives;
use crate::pareto::{nondominated_mask, parse_vector_line, sort_key};

pub type Weights = [f64; 4];

/// A list of objective vectors.
pub type Front = Vec<Objectives>;

/// `w_j = 1 / (max_j - min_j)` over the reference front, or 0 when the
/// objective is constant there.
pub fn spread_weights(reference: &[Objectives]) -> Result<Weights> {
    let first = reference.first().ok_or(Error::EmptyFront)?;
    let mut lo = first.0;
    let mut hi = first.0;
    for v in &reference[1..] {
        for j in 0..4 {
            lo[j] = lo[j].min(v.0[j]);
            hi[j] = hi[j].max(v.0[j]);
        }
    }
    Ok(std::array::from_fn(|j| {
        let spread = hi[j] - lo[j];
        if spread > 0.0 {
            1.0 / spread
        } else {
            0.0
        }
    }))
}

/// Weighted achievement distance from `x` to `y`.
pub fn c_dist(x: &Objectives, y: &Objectives, w: &Weights) -> f64 {
    (0..4).fold(0.0_f64, |acc, j| acc.max(w[j] * (x.0[j] - y.0[j])))
}

/// Approximation front prepared for nearest-distance queries.
///
/// A dominated point is never strictly closer than its dominator, so only the
/// nondominated points are kept. They are grouped by the second and fourth
/// objective; inside a group the first objective rises while the third falls,
/// so the best point for a query sits where the two weighted excesses cross
/// and is found by bisection.
struct FrontIndex {
    groups: Vec<Group>,
}

struct Group {
    g2: f64,
    g4: f64,
    // (first, third), first ascending.
    steps: Vec<(f64, f64)>,
}

impl FrontIndex {
    fn new(approx: &[Objectives]) -> Self {
        let keep = nondominated_mask(approx);
        let mut by_key: BTreeMap<(u64, u64), Group> = BTreeMap::new();
        for (v, _) in approx.iter().zip(keep).filter(|(_, k)| *k) {
            by_key
                .entry((sort_key(v.0[1]), sort_key(v.0[3])))
                .or_insert_with(|| Group { g2: v.0[1], g4: v.0[3], steps: Vec::new() })
                .steps
                .push((v.0[0], v.0[2]));
        }
        let mut groups: Vec<Group> = by_key.into_values().collect();
        for g in &mut groups {
            g.steps.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        Self { groups }
    }

    /// `min` over the approximation of `c_dist(x, y, w)`.
    fn closest(&self, y: &Objectives, w: &Weights) -> f64 {
        let mut best = f64::INFINITY;
        for g in &self.groups {
            let fixed = (w[1] * (g.g2 - y.0[1])).max(w[3] * (g.g4 - y.0[3])).max(0.0);
            let a = |k: usize| w[0] * (g.steps[k].0 - y.0[0]);
            let b = |k: usize| w[2] * (g.steps[k].1 - y.0[2]);
            let cross = g.steps.partition_point(|&(x1, x3)| w[0] * (x1 - y.0[0]) < w[2] * (x3 - y.0[2]));
            let mut inner = f64::INFINITY;
            if cross < g.steps.len() {
                inner = a(cross).max(b(cross));
            }
            if cross > 0 {
                inner = inner.min(a(cross - 1).max(b(cross - 1)));
            }
            best = best.min(fixed.max(inner));
        }
        best
    }
}

/// Mean over the reference points of the distance to the nearest
/// approximation point, weights taken from `reference`.
pub fn d1(approx: &[Objectives], reference: &[Objectives]) -> Result<f64> {
    let w = spread_weights(reference)?;
    d1_weighted(approx, reference, &w)
}

pub fn d1_weighted(approx: &[Objectives], reference: &[Objectives], w: &Weights) -> Result<f64> {
    if approx.is_empty() || reference.is_empty() {
        return Err(Error::EmptyFront);
    }
    let index = FrontIndex::new(approx);
    let total: f64 = reference.iter().map(|y| index.closest(y, w)).sum();
    Ok(total / reference.len() as f64)
}

/// Worst reference point's distance to the nearest approximation point.
pub fn d2(approx: &[Objectives], reference: &[Objectives]) -> Result<f64> {
    let w = spread_weights(reference)?;
    d2_weighted(approx, reference, &w)
}

pub fn d2_weighted(approx: &[Objectives], reference: &[Objectives], w: &Weights) -> Result<f64> {
    if approx.is_empty() || reference.is_empty() {
        return Err(Error::EmptyFront);
    }
    let index = FrontIndex::new(approx);
    Ok(reference
        .iter()
        .map(|y| index.closest(y, w))
        .fold(0.0, f64::max))
}

/// Nondominated union of the input fronts with repeated vectors collapsed.
/// Vectors keep their first-seen order.
pub fn build_reference<F: AsRef<[Objectives]>>(fronts: &[F]) -> Result<Front> {
    let pool: Front = fronts.iter().flat_map(|f| f.as_ref()).copied().collect();
    if pool.is_empty() {
        return Err(Error::EmptyFront);
    }
    let keep = nondominated_mask(&pool);
    Ok(pool
        .into_iter()
        .zip(keep)
        .filter_map(|(v, k)| k.then_some(v))
        .collect())
}

/// Reads a front file: one vector per line, four numbers followed by
/// optional provenance columns. Blank lines and `#` comments are skipped.
pub fn read_front<R: BufRead>(source: R) -> Result<Front> {
    let mut front = Vec::new();
    for (k, line) in source.lines().enumerate() {
        let line = line.map_err(|e| Error::FrontParse {
            line: k + 1,
            message: e.to_string(),
        })?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        front.push(parse_vector_line(text, k + 1)?.0);
    }
    Ok(front)
}

pub fn write_front(front: &[Objectives]) -> String {
    front.iter().map(|v| format!("{v}\n")).collect()
}
