//! Gauss-Legendre quadrature with adaptive node doubling.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the Legendre polynomial,
    /// starting from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            // One polishing step after convergence.
            let (p, dp) = legendre_with_derivative(n, x);
            x -= p / dp;
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        nodes.reverse();
        weights.reverse();
        GaussLegendre { nodes, weights }
    }

    /// Returns a cached rule; rules are immutable and shared between callers.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("quadrature cache poisoned");
        map.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over [a, b] by mapping the reference nodes.
    pub fn integrate<T: Real, F: Fn(T) -> T>(&self, a: T, b: T, f: F) -> T {
        let half = real::<T>(0.5) * (b - a);
        let mid = real::<T>(0.5) * (a + b);
        let mut sum = T::zero();
        for (&x, &w) in self.nodes.iter().zip(self.weights.iter()) {
            sum += real::<T>(w) * f(mid + half * real::<T>(x));
        }
        half * sum
    }
}

/// Legendre polynomial P_n and its derivative at x (three-term recurrence).
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over [a, b], doubling the node count from `base_nodes`
/// until two successive estimates agree to `rel_tol` (relative to the scale
/// of the integral, with an absolute floor of 1), at most `max_doublings`
/// times. Fails with a numeric error when the estimates never settle.
pub fn integrate_adaptive<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    base_nodes: usize,
    max_doublings: usize,
    rel_tol: f64,
) -> Result<T> {
    let mut n = base_nodes.max(2);
    let mut prev = GaussLegendre::cached(n).integrate(a, b, &f);
    for _ in 0..max_doublings {
        n *= 2;
        let next = GaussLegendre::cached(n).integrate(a, b, &f);
        let scale = T::one().max(next.abs());
        if (next - prev).abs() <= real::<T>(rel_tol) * scale {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numeric(format!(
        "quadrature did not converge after {max_doublings} doublings from {base_nodes} nodes"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        // n-point Gauss-Legendre is exact through degree 2n-1.
        let rule = GaussLegendre::new(5);
        let exact = 2.0 / 9.0; // integral of x^8 over [-1, 1]
        let got: f64 = rule.integrate(-1.0, 1.0, |x: f64| x.powi(8));
        assert!((got - exact).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn nodes_are_symmetric_and_weights_sum_to_two() {
        for n in [3usize, 8, 64, 129] {
            let rule = GaussLegendre::new(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n} wsum={wsum}");
            for i in 0..n {
                assert!((rule.nodes[i] + rule.nodes[n - 1 - i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn adaptive_matches_exponential() {
        let got: f64 = integrate_adaptive(|x: f64| x.exp(), -1.0, 1.0, 8, 4, 1e-12).unwrap();
        let exact = 1f64.exp() - (-1f64).exp();
        assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        // A kink at an irrational point defeats node doubling at this tolerance.
        let err = integrate_adaptive(
            |x: f64| (x - 0.3137515).abs().sqrt(),
            -1.0,
            1.0,
            2,
            2,
            1e-14,
        )
        .unwrap_err();
        assert!(err.is_numeric());
    }

    #[test]
    fn generic_over_f32() {
        let got: f32 = GaussLegendre::new(16).integrate(0.0f32, 1.0, |x| x * x);
        assert!((got - 1.0 / 3.0).abs() < 1e-6);
    }
}
