use rand::Rng;

use crate::encoding::Chromosome;

/// With probability `p_mut` for the whole individual, exchanges the genes at
/// two distinct uniformly chosen positions.
pub fn swap_mutation<R: Rng + ?Sized>(rng: &mut R, chromosome: Chromosome, p_mut: f64) -> Chromosome {
    let n = chromosome.len();
    if n < 2 || rng.random::<f64>() >= p_mut {
        return chromosome;
    }
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let mut genes = chromosome.into_genes();
    genes.swap(i, j);
    Chromosome::from_permutation(genes)
}
