//! Random matrices for unit tests.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dagger, ComplexMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    Array2::from_shape_fn((n, n), |_| C64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
}

pub fn random_hermitian(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let m = random_matrix(r, n);
    (&m + &dagger(&m)).mapv(|z| z * 0.5)
}

pub fn random_psd(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let m = random_matrix(r, n);
    m.dot(&dagger(&m))
}

/// Random density matrix (unit trace, full rank almost surely).
pub fn random_density(r: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let p = random_psd(r, n);
    let t = p.diag().sum();
    p / t
}
