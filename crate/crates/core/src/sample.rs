//! Seeded random resources for property checks and the CLI verifiers.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::prob::{Dist, StochMatrix};
use crate::quantum::{haar_unitary, BipartitePure, CMatrix, DensityMatrix, KrausChannel, C64};

/// Uniform on the probability simplex.
pub fn random_dist<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Dist {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    Dist::from_unnormalized(w).expect("exponential draws are positive")
}

/// Each row drawn uniformly from the simplex.
pub fn random_stochastic<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> StochMatrix {
    let rows = (0..rows).map(|_| random_dist(rng, cols).into()).collect();
    StochMatrix::new(rows).expect("rows are distributions")
}

/// A random function `rows -> cols` as a 0/1 matrix.
pub fn random_deterministic<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> StochMatrix {
    let f: Vec<usize> = (0..rows).map(|_| rng.gen_range(0..cols)).collect();
    StochMatrix::from_function(&f, cols)
}

/// Doubly stochastic matrix as a convex mixture of `terms` random permutations.
pub fn random_doubly_stochastic<R: Rng + ?Sized>(rng: &mut R, n: usize, terms: usize) -> StochMatrix {
    let weights = random_dist(rng, terms.max(1));
    let mut rows = vec![vec![0.0; n]; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for &w in weights.weights() {
        perm.shuffle(rng);
        for (i, &j) in perm.iter().enumerate() {
            rows[i][j] += w;
        }
    }
    StochMatrix::from_rows_normalized(rows, 1e-12).expect("mixture of permutations")
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    haar_unitary(d, rng.gen(), 0)
}

/// Full-rank density matrix from a square complex Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityMatrix {
    random_density_of_rank(rng, d, d)
}

pub fn random_density_of_rank<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> DensityMatrix {
    let g = CMatrix::from_fn(d, rank.max(1), |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).expect("Gram matrices are positive")
}

/// Mixture of `terms` Haar unitaries: a unital channel.
pub fn random_unital_channel<R: Rng + ?Sized>(rng: &mut R, d: usize, terms: usize) -> KrausChannel {
    let weights = random_dist(rng, terms.max(1));
    let ops = weights
        .weights()
        .iter()
        .map(|w| random_unitary(rng, d) * C64::new(w.sqrt(), 0.0))
        .collect();
    KrausChannel::new(ops).expect("mixture of unitaries is trace preserving")
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, dims: (usize, usize)) -> BipartitePure {
    let n = dims.0 * dims.1;
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    BipartitePure::new(v.into_iter().map(|z| z / norm).collect(), dims).expect("normalized")
}
