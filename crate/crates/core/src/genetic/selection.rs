use rand::Rng;

/// Roulette-wheel selection: index `i` with probability `f(i) / sum(f)`.
///
/// All fitness values must be positive.
pub fn select_parent<R: Rng + ?Sized>(rng: &mut R, fitness: &[f64]) -> usize {
    assert!(!fitness.is_empty(), "cannot select from an empty population");
    let total: f64 = fitness.iter().sum();
    let ball = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &f) in fitness.iter().enumerate() {
        acc += f;
        if ball < acc {
            return i;
        }
    }
    fitness.len() - 1
}
