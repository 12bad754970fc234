//! Configurations of unit vectors, Gram matrices, and the simplex
//! equiangular tight frame (ETF) reference object.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::{count, real, Real};

/// Unit norms are enforced to this tolerance after normalization.
pub const NORM_TOL: f64 = 1e-12;
/// Inputs whose norm deviates from 1 by more than this are rejected rather
/// than silently rescaled; smaller deviations are treated as float drift.
pub const NORM_REJECT_TOL: f64 = 1e-6;

/// An ordered set of `n` unit vectors in ambient dimension `m`.
///
/// Points are stored row-major; every row has Euclidean norm 1 within
/// [`NORM_TOL`]. Values are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration<T> {
    points: Vec<T>,
    n: usize,
    m: usize,
}

impl<T: Real> Configuration<T> {
    /// Builds a configuration from explicit points, normalizing each one.
    ///
    /// Rejects `n < 2`, `m < 2`, ragged rows, and rows whose norm deviates
    /// from 1 by more than [`NORM_REJECT_TOL`].
    pub fn new(points: Vec<Vec<T>>) -> Result<Self> {
        let n = points.len();
        if n < 2 {
            return Err(Error::Parameter(format!("need at least 2 points, got {n}")));
        }
        let m = points[0].len();
        if m < 2 {
            return Err(Error::Parameter(format!(
                "need ambient dimension >= 2, got {m}"
            )));
        }
        let mut flat = Vec::with_capacity(n * m);
        for (i, p) in points.iter().enumerate() {
            if p.len() != m {
                return Err(Error::ShapeMismatch(format!(
                    "point {i} has {} coordinates, expected {m}",
                    p.len()
                )));
            }
            let norm = norm(p);
            if (norm - T::one()).abs() > real(NORM_REJECT_TOL) {
                return Err(Error::Parameter(format!(
                    "point {i} has norm {norm}, more than {NORM_REJECT_TOL} away from 1"
                )));
            }
            if (norm - T::one()).abs() <= real(NORM_TOL) {
                // Already within the invariant; keep the bits unchanged so
                // that serialization round-trips exactly.
                flat.extend_from_slice(p);
            } else {
                flat.extend(p.iter().map(|&x| x / norm));
            }
        }
        Ok(Configuration { points: flat, n, m })
    }

    /// Builds a configuration from a flat row-major buffer, rescaling every
    /// row to unit length. Used by sampling and by the optimizer retraction,
    /// where rows are not expected to be unit to start with.
    pub(crate) fn from_flat_normalized(mut flat: Vec<T>, n: usize, m: usize) -> Result<Self> {
        if n < 2 || m < 2 {
            return Err(Error::Parameter(format!(
                "need n >= 2 and m >= 2, got n={n}, m={m}"
            )));
        }
        if flat.len() != n * m {
            return Err(Error::ShapeMismatch(format!(
                "buffer of length {} cannot hold {n} x {m} points",
                flat.len()
            )));
        }
        for row in flat.chunks_mut(m) {
            let norm = norm(row);
            if norm < real(1e-12) {
                return Err(Error::Parameter("cannot normalize a zero vector".into()));
            }
            for x in row {
                *x /= norm;
            }
        }
        Ok(Configuration { points: flat, n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.points.chunks(self.m)
    }

    pub fn flat(&self) -> &[T] {
        &self.points
    }

    /// The resultant vector U = sum of all points.
    pub fn resultant(&self) -> Vec<T> {
        let mut u = vec![T::zero(); self.m];
        for row in self.rows() {
            for (acc, &x) in u.iter_mut().zip(row) {
                *acc += x;
            }
        }
        u
    }

    /// Pairwise inner products as an n x n Gram matrix.
    pub fn gram(&self) -> GramMatrix<T> {
        let n = self.n;
        let mut entries = vec![T::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = norm_sq(self.point(i));
            for j in 0..i {
                let g = dot(self.point(i), self.point(j));
                entries[i * n + j] = g;
                entries[j * n + i] = g;
            }
        }
        GramMatrix { entries, n }
    }
}

/// Pairwise inner products as an n x n Gram matrix.
pub fn gram<T: Real>(config: &Configuration<T>) -> GramMatrix<T> {
    config.gram()
}

/// Two aligned configurations (u, v) for the asymmetric problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PairConfiguration<T> {
    u: Configuration<T>,
    v: Configuration<T>,
}

impl<T: Real> PairConfiguration<T> {
    pub fn new(u: Configuration<T>, v: Configuration<T>) -> Result<Self> {
        if u.n() != v.n() || u.m() != v.m() {
            return Err(Error::ShapeMismatch(format!(
                "u is {}x{}, v is {}x{}",
                u.n(),
                u.m(),
                v.n(),
                v.m()
            )));
        }
        Ok(PairConfiguration { u, v })
    }

    pub fn u(&self) -> &Configuration<T> {
        &self.u
    }

    pub fn v(&self) -> &Configuration<T> {
        &self.v
    }

    pub fn n(&self) -> usize {
        self.u.n()
    }

    pub fn m(&self) -> usize {
        self.u.m()
    }

    /// `<u_i, v_i>` for one index.
    pub fn alignment(&self, i: usize) -> T {
        dot(self.u.point(i), self.v.point(i))
    }

    /// The worst per-index alignment `min_i <u_i, v_i>`; equals 1 exactly
    /// when u = v.
    pub fn min_alignment(&self) -> T {
        (0..self.n())
            .map(|i| self.alignment(i))
            .fold(T::infinity(), T::min)
    }
}

/// The n x n matrix of pairwise inner products; the rotation-invariant
/// fingerprint of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T> {
    entries: Vec<T>,
    n: usize,
}

impl<T: Real> GramMatrix<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

/// Draws `n` independent points uniformly from the sphere S^{m-1}:
/// standard-normal coordinates followed by normalization. Deterministic
/// (bit-for-bit) given the seed.
pub fn sample_uniform<T: Real>(n: usize, m: usize, seed: u64) -> Result<Configuration<T>> {
    if n < 2 || m < 2 {
        return Err(Error::Parameter(format!(
            "need n >= 2 and m >= 2, got n={n}, m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_rows(&mut rng, n, m))
}

/// Draws an aligned (u, v) pair, both uniform, from one seeded stream.
pub fn sample_uniform_pair<T: Real>(n: usize, m: usize, seed: u64) -> Result<PairConfiguration<T>> {
    if n < 2 || m < 2 {
        return Err(Error::Parameter(format!(
            "need n >= 2 and m >= 2, got n={n}, m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = sample_rows(&mut rng, n, m);
    let v = sample_rows(&mut rng, n, m);
    PairConfiguration::new(u, v)
}

/// Samples `n` unit rows from an already-seeded stream.
pub(crate) fn sample_rows<T: Real>(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Configuration<T> {
    let mut flat = Vec::with_capacity(n * m);
    for _ in 0..n {
        loop {
            let row: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
            let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                flat.extend(row.iter().map(|&x| real::<T>(x / norm)));
                break;
            }
        }
    }
    Configuration::from_flat_normalized(flat, n, m).expect("sampled rows are unit")
}

/// The n vertices of the regular simplex centered at the origin, laid out in
/// the first n-1 coordinates and zero-padded to dimension m.
///
/// All pairwise inner products equal -1/(n-1) and the points sum to zero.
/// Requires m >= n-1 ("achievable" dimensions only).
///
/// ```
/// let tetrahedron = etflab::sphere::simplex_etf::<f64>(4, 3)?;
/// assert!((tetrahedron.gram().get(0, 1) + 1.0 / 3.0).abs() < 1e-12);
/// assert!(etflab::sphere::simplex_etf::<f64>(5, 3).is_err());
/// # Ok::<(), etflab::Error>(())
/// ```
pub fn simplex_etf<T: Real>(n: usize, m: usize) -> Result<Configuration<T>> {
    if n < 2 || m < 2 {
        return Err(Error::Parameter(format!(
            "need n >= 2 and m >= 2, got n={n}, m={m}"
        )));
    }
    if m < n - 1 {
        return Err(Error::InfeasibleDimension { n, m });
    }
    // Coordinates of the centered simplex in the Helmert basis of the
    // hyperplane orthogonal to (1, ..., 1): vertex i has j-th coordinate
    // s * h_j[i] with s = sqrt(n/(n-1)) and h_j the j-th Helmert vector.
    let s = (n as f64 / (n as f64 - 1.0)).sqrt();
    let mut flat = vec![T::zero(); n * m];
    for i in 0..n {
        for j in 1..n {
            let h = 1.0 / ((j as f64) * (j as f64 + 1.0)).sqrt();
            let coord = if i < j {
                h
            } else if i == j {
                -(j as f64) * h
            } else {
                0.0
            };
            flat[i * m + (j - 1)] = real::<T>(s * coord);
        }
    }
    Configuration::from_flat_normalized(flat, n, m)
}

/// Max over i != j of |<u_i, u_j> + 1/(n-1)|: zero exactly on simplex ETFs,
/// and rotation-invariant since it only reads the Gram matrix.
///
/// Only defined when an ETF of this size exists, i.e. n <= m + 1.
pub fn etf_distance<T: Real>(config: &Configuration<T>) -> Result<T> {
    let n = config.n();
    if n > config.m() + 1 {
        return Err(Error::InfeasibleDimension { n, m: config.m() });
    }
    let target = -T::one() / count::<T>(n - 1);
    let g = config.gram();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((g.get(i, j) - target).abs());
        }
    }
    Ok(worst)
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub(crate) fn norm_sq<T: Real>(a: &[T]) -> T {
    dot(a, a)
}

#[inline]
pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{orthonormal, rotate};

    #[test]
    fn sampled_points_are_unit() {
        let c: Configuration<f64> = sample_uniform(2, 3, 7).unwrap();
        for row in c.rows() {
            assert!((norm(row) - 1.0).abs() <= NORM_TOL);
        }
    }

    #[test]
    fn sampling_is_reproducible_bit_for_bit() {
        let a: Configuration<f64> = sample_uniform(5, 4, 123).unwrap();
        let b: Configuration<f64> = sample_uniform(5, 4, 123).unwrap();
        assert_eq!(a.flat(), b.flat());
        let c: Configuration<f64> = sample_uniform(5, 4, 124).unwrap();
        assert_ne!(a.flat(), c.flat());
    }

    #[test]
    fn large_sample_has_small_mean_resultant() {
        let c: Configuration<f64> = sample_uniform(1000, 3, 1).unwrap();
        let r = norm(&c.resultant()) / 1000.0;
        assert!(r < 0.1, "mean resultant {r}");
    }

    #[test]
    fn invalid_counts_are_rejected() {
        assert!(sample_uniform::<f64>(2, 1, 0).is_err());
        assert!(sample_uniform::<f64>(1, 3, 0).is_err());
        assert!(simplex_etf::<f64>(1, 3).is_err());
    }

    #[test]
    fn construction_rejects_far_from_unit_inputs() {
        let bad = vec![vec![1.001, 0.0], vec![0.0, 1.0]];
        assert!(Configuration::new(bad).is_err());
        // Drift below the rejection threshold is normalized away.
        let drifted = vec![vec![1.0f64 + 1e-9, 0.0], vec![0.0, 1.0]];
        let c = Configuration::new(drifted).unwrap();
        assert!((norm(c.point(0)) - 1.0).abs() <= NORM_TOL);
    }

    #[test]
    fn gram_of_orthonormal_pair_is_identity() {
        let c: Configuration<f64> = orthonormal(2, 2);
        let g = c.gram();
        assert!((g.get(0, 0) - 1.0).abs() < 1e-15);
        assert!((g.get(1, 1) - 1.0).abs() < 1e-15);
        assert!(g.get(0, 1).abs() < 1e-15);
        assert!(g.get(1, 0).abs() < 1e-15);
    }

    #[test]
    fn gram_of_antipodal_pair() {
        let c: Configuration<f64> =
            Configuration::new(vec![vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        assert!((c.gram().get(0, 1) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn tetrahedron_gram_entries() {
        let c: Configuration<f64> = simplex_etf(4, 3).unwrap();
        let g = c.gram();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { -1.0 / 3.0 };
                assert!((g.get(i, j) - expect).abs() < 1e-10, "g[{i}][{j}]");
            }
        }
        assert!(norm(&c.resultant()) < 1e-10);
    }

    #[test]
    fn antipodal_pair_is_the_two_point_simplex() {
        let c: Configuration<f64> = simplex_etf(2, 2).unwrap();
        assert!((c.gram().get(0, 1) + 1.0).abs() < 1e-10);
    }

    #[test]
    fn simplex_needs_enough_dimensions() {
        match simplex_etf::<f64>(5, 3) {
            Err(Error::InfeasibleDimension { n: 5, m: 3 }) => {}
            other => panic!("expected infeasible dimension, got {other:?}"),
        }
    }

    #[test]
    fn simplex_sweep_zero_sum_and_zero_distance() {
        for m in 2..=16usize {
            for n in 2..=(m + 1) {
                let c: Configuration<f64> = simplex_etf(n, m).unwrap();
                assert!(norm(&c.resultant()) <= 1e-10, "resultant n={n} m={m}");
                assert!(etf_distance(&c).unwrap() <= 1e-10, "distance n={n} m={m}");
            }
        }
    }

    #[test]
    fn etf_distance_of_orthonormal_basis() {
        let c: Configuration<f64> = orthonormal(3, 3);
        assert!((etf_distance(&c).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn etf_distance_vanishes_on_rotated_frames() {
        let etf: Configuration<f64> = simplex_etf(5, 6).unwrap();
        let rotated = rotate(&etf, 4242);
        assert!(etf_distance(&rotated).unwrap() <= 1e-10);
    }

    #[test]
    fn etf_distance_requires_feasible_shape() {
        let c: Configuration<f64> = sample_uniform(5, 3, 0).unwrap();
        assert!(etf_distance(&c).is_err());
    }

    #[test]
    fn etf_distance_matches_pairwise_enumeration() {
        let c: Configuration<f64> = sample_uniform(3, 4, 11).unwrap();
        let g = c.gram();
        let mut expect = 0.0f64;
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            expect = expect.max((g.get(i, j) + 0.5).abs());
        }
        assert!((etf_distance(&c).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn gram_is_rotation_invariant() {
        let c: Configuration<f64> = sample_uniform(6, 4, 42).unwrap();
        let rotated = rotate(&c, 99);
        let g0 = c.gram();
        let g1 = rotated.gram();
        for i in 0..6 {
            for j in 0..6 {
                assert!((g0.get(i, j) - g1.get(i, j)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pair_configuration_checks_shapes() {
        let u: Configuration<f64> = sample_uniform(3, 3, 1).unwrap();
        let v: Configuration<f64> = sample_uniform(4, 3, 2).unwrap();
        assert!(PairConfiguration::new(u.clone(), v).is_err());
        let w: Configuration<f64> = sample_uniform(3, 3, 3).unwrap();
        assert!(PairConfiguration::new(u, w).is_ok());
    }
}
