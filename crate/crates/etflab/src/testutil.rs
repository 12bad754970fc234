//! Helpers shared by the unit tests: reference configurations and random
//! orthogonal transformations for rotation-invariance checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::sphere::{dot, Configuration};

/// The first n rows of the m x m identity, as a configuration (n <= m).
pub(crate) fn orthonormal(n: usize, m: usize) -> Configuration<f64> {
    assert!(n <= m);
    let mut flat = vec![0.0; n * m];
    for i in 0..n {
        flat[i * m + i] = 1.0;
    }
    Configuration::from_flat_normalized(flat, n, m).unwrap()
}

/// All points coincident at e_1.
pub(crate) fn coincident(n: usize, m: usize) -> Configuration<f64> {
    let mut flat = vec![0.0; n * m];
    for i in 0..n {
        flat[i * m] = 1.0;
    }
    Configuration::from_flat_normalized(flat, n, m).unwrap()
}

/// A random m x m orthogonal matrix: Gram-Schmidt on a Gaussian matrix.
pub(crate) fn random_rotation(m: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
    while q.len() < m {
        let mut v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        for prev in &q {
            let proj = dot(&v, prev);
            for (x, &p) in v.iter_mut().zip(prev) {
                *x -= proj * p;
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-8 {
            for x in &mut v {
                *x /= norm;
            }
            q.push(v);
        }
    }
    q
}

/// Applies a seeded random rotation to every point of the configuration.
pub(crate) fn rotate(config: &Configuration<f64>, seed: u64) -> Configuration<f64> {
    let q = random_rotation(config.m(), seed);
    apply_rotation(config, &q)
}

pub(crate) fn apply_rotation(config: &Configuration<f64>, q: &[Vec<f64>]) -> Configuration<f64> {
    let m = config.m();
    let mut flat = Vec::with_capacity(config.n() * m);
    for row in config.rows() {
        for qi in q.iter().take(m) {
            flat.push(dot(qi, row));
        }
    }
    Configuration::from_flat_normalized(flat, config.n(), m).unwrap()
}
