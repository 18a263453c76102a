//! Seeded random instances: GUE generators, Haar states, random projectors.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::qcore::eigen::eig_hermitian;
use crate::qcore::matrix::{check_dim, Operator, OperatorKind};
use crate::qcore::state::StateVector;
use crate::qcore::C64;

/// A randomly drawn generator, postselection projector, and input state.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub generator: Operator,
    pub projector: Operator,
    pub input_state: StateVector,
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Random Hermitian matrix: complex Gaussian entries, symmetrized.
pub fn gue_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let raw: Vec<C64> = (0..dim * dim).map(|_| gaussian_complex(rng)).collect();
    Operator::raw(dim, raw, OperatorKind::General).symmetrized()
}

/// Haar-random pure state.
pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    loop {
        let amplitudes: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        if let Ok(state) = StateVector::raw_unnormalized(amplitudes).renormalized() {
            return state;
        }
    }
}

/// Orthonormalizes columns with two Gram-Schmidt passes. Columns whose
/// residual norm collapses (rank deficiency) are rejected.
fn gram_schmidt(dim: usize, columns: Vec<Vec<C64>>) -> Option<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(columns.len());
    for mut col in columns {
        for _ in 0..2 {
            for prev in &out {
                let overlap: C64 = prev
                    .iter()
                    .zip(col.iter())
                    .map(|(p, c)| p.conj() * c)
                    .sum();
                for i in 0..dim {
                    col[i] -= overlap * prev[i];
                }
            }
        }
        let norm: f64 = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        let inv = C64::new(1.0 / norm, 0.0);
        for c in col.iter_mut() {
            *c *= inv;
        }
        out.push(col);
    }
    Some(out)
}

/// Haar-random unitary (Gaussian matrix orthonormalized column by column).
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    loop {
        let columns: Vec<Vec<C64>> = (0..dim)
            .map(|_| (0..dim).map(|_| gaussian_complex(rng)).collect())
            .collect();
        if let Some(cols) = gram_schmidt(dim, columns) {
            let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
            for (j, col) in cols.iter().enumerate() {
                for i in 0..dim {
                    entries[i * dim + j] = col[i];
                }
            }
            if let Ok(u) = Operator::unitary(dim, entries) {
                return u;
            }
        }
    }
}

/// Projector onto the span of `k` Haar-random orthonormal vectors.
pub fn haar_projector<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Operator {
    assert!(rank >= 1 && rank <= dim, "projector rank out of range");
    loop {
        let columns: Vec<Vec<C64>> = (0..rank)
            .map(|_| (0..dim).map(|_| gaussian_complex(rng)).collect())
            .collect();
        if let Some(cols) = gram_schmidt(dim, columns) {
            let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
            for col in &cols {
                for i in 0..dim {
                    for j in 0..dim {
                        entries[i * dim + j] += col[i] * col[j].conj();
                    }
                }
            }
            if let Ok(p) = Operator::projector(dim, entries) {
                return p;
            }
        }
    }
}

/// Draws a generator A, a projector F, and an input state, reproducibly from
/// the seed. With `commuting` set, F projects onto a random nonempty proper
/// subset of A's eigenvectors, so [A, F] = 0 by construction; otherwise F
/// projects onto a Haar-random subspace of random rank.
pub fn random_instance(dim: usize, seed: u64, commuting: bool) -> Result<RandomInstance> {
    if dim < 2 {
        return Err(Error::InvalidDim {
            dim,
            min: 2,
            max: super::matrix::MAX_DIM,
        });
    }
    check_dim(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generator = gue_hermitian(dim, &mut rng);
    let input_state = haar_state(dim, &mut rng);
    let rank = rng.random_range(1..dim);

    let projector = if commuting {
        let sys = eig_hermitian(&generator)?;
        let mut indices: Vec<usize> = (0..dim).collect();
        // Partial Fisher-Yates: the first `rank` slots become the subset.
        for i in 0..rank {
            let j = rng.random_range(i..dim);
            indices.swap(i, j);
        }
        let mut subset = indices[..rank].to_vec();
        subset.sort_unstable();
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for &idx in &subset {
            let v = sys.eigenvector(idx);
            let a = v.amplitudes();
            for i in 0..dim {
                for j in 0..dim {
                    entries[i * dim + j] += a[i] * a[j].conj();
                }
            }
        }
        Operator::projector(dim, entries)?
    } else {
        haar_projector(dim, rank, &mut rng)
    };

    Ok(RandomInstance {
        generator,
        projector,
        input_state,
    })
}

/// Fresh instance seeds for a suite, drawn from one master stream.
pub fn seed_stream(master_seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    (0..count).map(|_| rng.next_u64()).collect()
}
