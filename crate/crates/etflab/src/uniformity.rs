//! Uniformity diagnostics for the many-points regime: resultant length,
//! frame-potential ratio, low-order Gegenbauer moments, and the energy of
//! the zonal von Mises-Fisher family on S^2.

use crate::error::{Error, Result};
use crate::gegenbauer::moments_up_to;
use crate::quad::GaussLegendre;
use crate::scalar::{count, real, Real};
use crate::sphere::{norm, Configuration};

/// Summary statistics that vanish (or tend to 1) exactly when the empirical
/// measure of the configuration is uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport<T> {
    pub n: usize,
    pub m: usize,
    /// |sum u_i| / n, in [0, 1]. Zero for balanced configurations.
    pub mean_resultant: T,
    /// frame_potential * m / n^2, at least 1; equal to 1 for tight frames.
    pub frame_ratio: T,
    /// (l, M_l) for l = 1..=L.
    pub moments: Vec<(usize, T)>,
}

/// `|sum u_i| / n`.
pub fn mean_resultant<T: Real>(config: &Configuration<T>) -> T {
    norm(&config.resultant()) / count::<T>(config.n())
}

/// Assembles the uniformity diagnostics with moments up to degree `lmax`.
/// Requires ambient dimension m >= 3 (the moment machinery needs it).
pub fn uniformity_report<T: Real>(
    config: &Configuration<T>,
    lmax: usize,
) -> Result<UniformityReport<T>> {
    let moments = moments_up_to(config, lmax)?;
    let n = count::<T>(config.n());
    Ok(UniformityReport {
        n: config.n(),
        m: config.m(),
        mean_resultant: mean_resultant(config),
        frame_ratio: crate::energy::frame_potential(config) * count::<T>(config.m()) / (n * n),
        moments: moments
            .into_iter()
            .enumerate()
            .skip(1)
            .collect(),
    })
}

/// Cross-entropy energy of the von Mises-Fisher measure `mu_kappa` on S^2
/// (density proportional to `e^{kappa <pole, y>}`):
///
/// `L_alpha(mu) = integral log( integral e^{alpha(<x,y> - 1)} mu(dy) ) mu(dx)`.
///
/// Zonal symmetry reduces both measure integrals to the polar cosine, handled
/// by Gauss-Legendre; the remaining azimuth integral of the kernel is
/// periodic and handled by the trapezoid rule. The vMF normalization is the
/// closed form `kappa / (2 sinh kappa)` in the polar cosine. Node counts are
/// doubled (up to 4 times) until two successive values agree.
///
/// At `kappa = 0` this is the uniform measure: `log(sinh(alpha)/alpha) - alpha`.
pub fn vmf_energy<T: Real>(kappa: T, alpha: T, pole: &[T], nodes: usize) -> Result<T> {
    if pole.len() != 3 {
        return Err(Error::UnsupportedDimension(format!(
            "vMF energy is implemented on S^2 only; pole has {} coordinates",
            pole.len()
        )));
    }
    if (norm(pole) - T::one()).abs() > real(1e-6) {
        return Err(Error::Parameter("pole must be a unit vector".into()));
    }
    if kappa < T::zero() || !kappa.is_finite() {
        return Err(Error::Parameter(format!("kappa must be >= 0, got {kappa}")));
    }
    if alpha < T::zero() || !alpha.is_finite() {
        return Err(Error::Parameter(format!("alpha must be >= 0, got {alpha}")));
    }
    if nodes < 32 {
        return Err(Error::Parameter(format!("need at least 32 nodes, got {nodes}")));
    }

    let mut n = nodes;
    let mut prev = vmf_energy_at(kappa, alpha, n);
    for _ in 0..4 {
        n *= 2;
        let next = vmf_energy_at(kappa, alpha, n);
        if (next - prev).abs() <= real::<T>(1e-9) * T::one().max(next.abs()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numeric(format!(
        "vMF energy quadrature did not settle after 4 doublings from {nodes} nodes"
    )))
}

fn vmf_energy_at<T: Real>(kappa: T, alpha: T, n: usize) -> T {
    let rule = GaussLegendre::cached(n);
    // Weight of the polar cosine under the vMF measure, written with
    // exponents shifted by kappa so large kappa cannot overflow:
    // kappa e^{kappa(t-1)} / (1 - e^{-2 kappa}), or 1/2 at kappa = 0.
    // The denominator uses exp_m1 so the kappa -> 0 limit is smooth.
    let weight = |t: T| -> T {
        if kappa == T::zero() {
            real(0.5)
        } else {
            kappa * (kappa * (t - T::one())).exp() / (-(-real::<T>(2.0) * kappa).exp_m1())
        }
    };
    // Azimuth grid for the inner kernel average (trapezoid on a period).
    let cos_phi: Vec<T> = (0..n)
        .map(|j| real::<T>(2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect();
    let inv_n_phi = T::one() / count::<T>(n);

    // Inner integral f(s) = E_{y ~ mu}[ e^{alpha(<x,y> - 1)} ] at <pole,x> = s.
    let inner = |s: T| -> T {
        let s_sin = (T::one() - s * s).max(T::zero()).sqrt();
        rule.integrate(-T::one(), T::one(), |t: T| {
            let t_sin = (T::one() - t * t).max(T::zero()).sqrt();
            let radial = alpha * (s * t - T::one());
            let rho = alpha * s_sin * t_sin;
            let mut mean = T::zero();
            for &c in &cos_phi {
                mean += (radial + rho * c).exp();
            }
            weight(t) * mean * inv_n_phi
        })
    };

    rule.integrate(-T::one(), T::one(), |s: T| weight(s) * inner(s).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::{sample_uniform, simplex_etf};
    use crate::testutil::coincident;

    const POLE: [f64; 3] = [0.0, 0.0, 1.0];

    #[test]
    fn mean_resultant_values() {
        let etf = simplex_etf::<f64>(5, 4).unwrap();
        assert!(mean_resultant(&etf) < 1e-10);
        let cluster = coincident(7, 3);
        assert!((mean_resultant(&cluster) - 1.0).abs() < 1e-12);
        let big = sample_uniform::<f64>(10_000, 3, 123).unwrap();
        assert!(mean_resultant(&big) < 0.03);
    }

    #[test]
    fn report_on_tight_frames() {
        for n in [4usize, 5, 8] {
            let etf = simplex_etf::<f64>(n, n - 1).unwrap();
            let report = uniformity_report(&etf, 4).unwrap();
            assert!((report.frame_ratio - 1.0).abs() < 1e-9, "n={n}");
            assert!(report.mean_resultant < 1e-10);
        }
    }

    #[test]
    fn report_matches_gram_recomputation() {
        let c = sample_uniform::<f64>(8, 4, 77).unwrap();
        let report = uniformity_report(&c, 6).unwrap();
        let g = c.gram();
        let n = 8usize;
        let mut sum_g = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            for j in 0..n {
                sum_g += g.get(i, j);
                sum_sq += g.get(i, j) * g.get(i, j);
            }
        }
        let resultant_from_gram = sum_g.max(0.0).sqrt() / n as f64;
        assert!((report.mean_resultant - resultant_from_gram).abs() < 1e-12);
        let ratio_from_gram = sum_sq * 4.0 / (n * n) as f64;
        assert!((report.frame_ratio - ratio_from_gram).abs() < 1e-12);
        assert_eq!(report.moments.len(), 6);
        assert_eq!(report.moments[0].0, 1);
        for &(_, ml) in &report.moments {
            assert!(ml >= -1e-9);
        }
    }

    #[test]
    fn report_rejects_the_circle() {
        let c = sample_uniform::<f64>(5, 2, 3).unwrap();
        assert!(uniformity_report(&c, 4).is_err());
    }

    #[test]
    fn coincident_moments_are_maximal() {
        let cluster = coincident(5, 3);
        let mc = moments_up_to(&cluster, 4).unwrap();
        for seed in 0..20u64 {
            let c = sample_uniform::<f64>(5, 3, seed).unwrap();
            let mr = moments_up_to(&c, 4).unwrap();
            for l in 1..=4usize {
                assert!(mc[l] >= mr[l] - 1e-12, "l={l} seed={seed}");
            }
        }
    }

    #[test]
    fn vmf_uniform_value_matches_closed_form() {
        for alpha in [0.5f64, 1.0, 2.0] {
            let expect = (alpha.sinh() / alpha).ln() - alpha;
            let got = vmf_energy(0.0, alpha, &POLE, 64).unwrap();
            assert!((got - expect).abs() < 1e-9, "alpha={alpha}: {got} vs {expect}");
        }
        let at_one = vmf_energy(0.0, 1.0, &POLE, 64).unwrap();
        assert!((at_one - (-0.8385606)).abs() < 1e-6);
    }

    #[test]
    fn vmf_energy_increases_with_kappa() {
        let kappas = [0.0, 1.0, 2.0, 5.0, 10.0];
        let values: Vec<f64> = kappas
            .iter()
            .map(|&k| vmf_energy(k, 1.0, &POLE, 64).unwrap())
            .collect();
        for w in values.windows(2) {
            assert!(w[1] > w[0], "not strictly increasing: {values:?}");
        }
    }

    #[test]
    fn vmf_concentrated_limit_approaches_zero() {
        let v = vmf_energy(50.0, 1.0, &POLE, 128).unwrap();
        assert!(v < 0.0 && v > -0.05, "kappa=50 energy {v}");
    }

    #[test]
    fn vmf_zero_alpha_is_zero() {
        let v = vmf_energy(2.0, 0.0, &POLE, 64).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn vmf_is_continuous_at_tiny_kappa() {
        let uniform = vmf_energy(0.0, 1.0, &POLE, 64).unwrap();
        for kappa in [1e-300, 1e-18, 1e-9] {
            let v = vmf_energy(kappa, 1.0, &POLE, 64).unwrap();
            assert!(v.is_finite() && (v - uniform).abs() < 1e-8, "kappa={kappa}: {v}");
        }
    }

    #[test]
    fn vmf_validates_inputs() {
        assert!(vmf_energy(-1.0, 1.0, &POLE, 64).is_err());
        assert!(vmf_energy(1.0, 1.0, &POLE, 16).is_err());
        assert!(vmf_energy(1.0, 1.0, &[0.0, 0.0, 0.9], 64).is_err());
        assert!(vmf_energy(1.0, 1.0, &[0.0, 1.0], 64).is_err());
    }
}
