//! Gegenbauer polynomials, the zonal expansion of `t -> e^{alpha t}`, its
//! positive coefficients with their closed-form normalizing constants, and
//! the moment form of the energy gap.
//!
//! Dimension convention: points live in ambient dimension `m`, on the sphere
//! S^{m-1}; this module's paper-facing parameter is `d = m - 1`, so the
//! Gegenbauer index is `lambda = (d-1)/2 = (m-2)/2`. The circle (`m = 2`,
//! `lambda = 0`) is excluded from expansion-based operations.

use crate::error::{Error, Result};
use crate::quad::integrate_adaptive;
use crate::scalar::{count, real, Real};
use crate::sphere::{dot, Configuration};

/// Evaluates `C_k^lambda(t)` by the three-term recurrence
/// `C_0 = 1`, `C_1 = 2 lambda t`,
/// `k C_k = 2(k + lambda - 1) t C_{k-1} - (k + 2 lambda - 2) C_{k-2}`.
pub fn gegenbauer_eval<T: Real>(k: usize, lambda: T, t: T) -> Result<T> {
    if lambda <= T::zero() || lambda.is_nan() {
        return Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")));
    }
    if t.abs() > T::one() + real(1e-12) {
        return Err(Error::Domain(format!("t = {t} outside [-1, 1]")));
    }
    Ok(gegenbauer_unchecked(k, lambda, t))
}

fn gegenbauer_unchecked<T: Real>(k: usize, lambda: T, t: T) -> T {
    if k == 0 {
        return T::one();
    }
    let two = real::<T>(2.0);
    let mut prev = T::one();
    let mut cur = two * lambda * t;
    for j in 2..=k {
        let jf = count::<T>(j);
        let next = (two * (jf - T::one() + lambda) * t * cur
            - (jf - two + two * lambda) * prev)
            / jf;
        prev = cur;
        cur = next;
    }
    cur
}

/// All values `C_0^lambda(t) .. C_kmax^lambda(t)` in one recurrence pass.
pub fn gegenbauer_all<T: Real>(kmax: usize, lambda: T, t: T) -> Result<Vec<T>> {
    if lambda <= T::zero() || lambda.is_nan() {
        return Err(Error::Parameter(format!("lambda must be > 0, got {lambda}")));
    }
    if t.abs() > T::one() + real(1e-12) {
        return Err(Error::Domain(format!("t = {t} outside [-1, 1]")));
    }
    let two = real::<T>(2.0);
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(T::one());
    if kmax == 0 {
        return Ok(out);
    }
    out.push(two * lambda * t);
    for j in 2..=kmax {
        let jf = count::<T>(j);
        let next = (two * (jf - T::one() + lambda) * t * out[j - 1]
            - (jf - two + two * lambda) * out[j - 2])
            / jf;
        out.push(next);
    }
    Ok(out)
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::UnsupportedDimension(format!(
            "expansion machinery needs sphere parameter d >= 2, got {d}"
        )));
    }
    Ok(())
}

/// Squared L2 norm of `C_k^{(d-1)/2}` under the weight `(1-x^2)^{(d-2)/2}`:
///
/// `alpha1(k,d) = pi 2^{2-d} Gamma(k+d-1) / (k! (k+(d-1)/2) Gamma((d-1)/2)^2)`.
pub fn alpha1<T: Real>(k: usize, d: usize) -> Result<T> {
    Ok(ln_alpha1::<T>(k, d)?.exp())
}

fn ln_alpha1<T: Real>(k: usize, d: usize) -> Result<T> {
    check_d(d)?;
    let kf = k as f64;
    let df = d as f64;
    let ln = std::f64::consts::PI.ln() + (2.0 - df) * 2f64.ln() + f64::lgamma(kf + df - 1.0)
        - f64::lgamma(kf + 1.0)
        - (kf + (df - 1.0) / 2.0).ln()
        - 2.0 * f64::lgamma((df - 1.0) / 2.0);
    Ok(real(ln))
}

/// Constant in the Rodrigues formula for `C_k^{(d-1)/2}`:
///
/// `alpha2(k,d) = (1/(2^k k!)) Gamma(d/2) Gamma(k+d-1) / (Gamma(d-1) Gamma(d/2+k))`.
pub fn alpha2<T: Real>(k: usize, d: usize) -> Result<T> {
    Ok(ln_alpha2::<T>(k, d)?.exp())
}

fn ln_alpha2<T: Real>(k: usize, d: usize) -> Result<T> {
    check_d(d)?;
    let kf = k as f64;
    let df = d as f64;
    let ln = -kf * 2f64.ln() - f64::lgamma(kf + 1.0) + f64::lgamma(df / 2.0)
        + f64::lgamma(kf + df - 1.0)
        - f64::lgamma(df - 1.0)
        - f64::lgamma(df / 2.0 + kf);
    Ok(real(ln))
}

/// Natural log of the expansion coefficient `b_k` of
/// `e^{alpha t} = sum_k b_k C_k^{(d-1)/2}(t)`, assembled entirely in log
/// space so that degrees up to a few hundred neither overflow nor underflow:
///
/// `b_k = alpha2(k,d) alpha^k I(k,d,alpha) / alpha1(k,d)`,
/// `I = integral_{-1}^{1} e^{alpha x} (1-x^2)^{k+(d-2)/2} dx`.
///
/// `I` uses the positive, smooth post-integration-by-parts form and is
/// evaluated after `x = cos(theta)` by adaptive Gauss-Legendre quadrature to
/// relative tolerance 1e-12.
pub fn ln_coeff_b<T: Real>(k: usize, d: usize, alpha: T) -> Result<T> {
    check_d(d)?;
    if alpha <= T::zero() || !alpha.is_finite() {
        return Err(Error::Parameter(format!("alpha must be > 0, got {alpha}")));
    }
    let power = (2 * k + d - 1) as i32;
    let integral = integrate_adaptive(
        |theta: T| (alpha * theta.cos()).exp() * theta.sin().powi(power),
        T::zero(),
        real(std::f64::consts::PI),
        64,
        6,
        1e-12,
    )?;
    Ok(ln_alpha2::<T>(k, d)? + count::<T>(k) * alpha.ln() + integral.ln() - ln_alpha1::<T>(k, d)?)
}

/// The expansion coefficient `b_k` itself; strictly positive for alpha > 0.
/// Beyond degree k of roughly 150 the true value drops below the smallest
/// positive double and this returns +0; use [`ln_coeff_b`] there.
///
/// ```
/// // On S^2, b_0 is the mean of e^{<x,y>} over uniform x, y: sinh(1).
/// let b0 = etflab::gegenbauer::coeff_b::<f64>(0, 2, 1.0)?;
/// assert!((b0 - 1f64.sinh()).abs() < 1e-12);
/// # Ok::<(), etflab::Error>(())
/// ```
pub fn coeff_b<T: Real>(k: usize, d: usize, alpha: T) -> Result<T> {
    Ok(ln_coeff_b(k, d, alpha)?.exp())
}

/// Coefficients `b_0 .. b_K` of the zonal expansion of `t -> e^{alpha t}`
/// on the sphere S^d.
#[derive(Debug, Clone, PartialEq)]
pub struct GegenbauerSeries<T> {
    d: usize,
    lambda: T,
    alpha: T,
    coeffs: Vec<T>,
}

impl<T: Real> GegenbauerSeries<T> {
    pub fn new(d: usize, alpha: T, kmax: usize) -> Result<Self> {
        check_d(d)?;
        let coeffs = (0..=kmax)
            .map(|k| coeff_b(k, d, alpha))
            .collect::<Result<Vec<T>>>()?;
        Ok(GegenbauerSeries {
            d,
            lambda: lambda_of_d::<T>(d),
            alpha,
            coeffs,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn k_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Evaluates the truncated expansion at t.
    pub fn eval(&self, t: T) -> Result<T> {
        let c = gegenbauer_all(self.k_max(), self.lambda, t)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&c)
            .fold(T::zero(), |acc, (&b, &ck)| acc + b * ck))
    }
}

fn lambda_of_d<T: Real>(d: usize) -> T {
    real::<T>((d as f64 - 1.0) / 2.0)
}

/// Max over an equispaced grid of `|e^{alpha t} - sum_{k<=K} b_k C_k(t)|`.
pub fn expansion_residual<T: Real>(kmax: usize, d: usize, alpha: T, grid: usize) -> Result<T> {
    if grid < 2 {
        return Err(Error::Parameter(format!("grid must be >= 2, got {grid}")));
    }
    let series = GegenbauerSeries::new(d, alpha, kmax)?;
    let mut worst = T::zero();
    for i in 0..grid {
        let t = real::<T>(-1.0 + 2.0 * i as f64 / (grid as f64 - 1.0));
        let err = ((alpha * t).exp() - series.eval(t)?).abs();
        worst = worst.max(err);
    }
    Ok(worst)
}

/// `log(1/b_k) / (k log k)` for k in `k_lo ..= k_hi`; tends to 1 as k grows.
/// Computed from [`ln_coeff_b`], so it stays meaningful long after `b_k`
/// itself underflows.
pub fn decay_diagnostic<T: Real>(
    d: usize,
    alpha: T,
    k_lo: usize,
    k_hi: usize,
) -> Result<Vec<T>> {
    if k_lo < 2 || k_hi < k_lo {
        return Err(Error::Parameter(format!(
            "need 2 <= k_lo <= k_hi, got [{k_lo}, {k_hi}]"
        )));
    }
    (k_lo..=k_hi)
        .map(|k| {
            let ln_b = ln_coeff_b(k, d, alpha)?;
            let kf = count::<T>(k);
            Ok(-ln_b / (kf * kf.ln()))
        })
        .collect()
}

/// Configuration moments `M_l = (1/n^2) sum_{i,j} C_l^lambda(<u_i,u_j>)` for
/// l = 0..=lmax, with `lambda = (m-2)/2`. Each is nonnegative by the addition
/// formula. Requires ambient dimension m >= 3.
pub fn moments_up_to<T: Real>(config: &Configuration<T>, lmax: usize) -> Result<Vec<T>> {
    let m = config.m();
    if m < 3 {
        return Err(Error::UnsupportedDimension(format!(
            "moments need ambient dimension >= 3 (lambda > 0), got {m}"
        )));
    }
    let lambda = real::<T>((m as f64 - 2.0) / 2.0);
    let n = config.n();
    let two = real::<T>(2.0);
    let mut acc = vec![T::zero(); lmax + 1];
    for i in 0..n {
        let ui = config.point(i);
        for j in 0..=i {
            let weight = if i == j { T::one() } else { two };
            let g = dot(ui, config.point(j));
            // Inline recurrence, accumulating every degree as it appears.
            let mut prev = T::one();
            acc[0] += weight;
            if lmax == 0 {
                continue;
            }
            let mut cur = two * lambda * g;
            acc[1] += weight * cur;
            for (l, slot) in acc.iter_mut().enumerate().skip(2) {
                let lf = count::<T>(l);
                let next = (two * (lf - T::one() + lambda) * g * cur
                    - (lf - two + two * lambda) * prev)
                    / lf;
                prev = cur;
                cur = next;
                *slot += weight * next;
            }
        }
    }
    let nsq = count::<T>(n) * count::<T>(n);
    for a in &mut acc {
        *a /= nsq;
    }
    Ok(acc)
}

/// The single moment `M_l`; see [`moments_up_to`].
pub fn moment<T: Real>(config: &Configuration<T>, ell: usize) -> Result<T> {
    Ok(moments_up_to(config, ell)?[ell])
}

/// Energy gap reconstructed from the expansion:
/// `sum_{l=1..K} b_l M_l` with `b_l` taken at sphere parameter `d = m - 1`.
/// Agrees with [`crate::energy::energy_gap`] once K covers every coefficient
/// above double-precision noise; the l = 0 term is the uniform energy.
pub fn gap_via_moments<T: Real>(config: &Configuration<T>, alpha: T, kmax: usize) -> Result<T> {
    let m = config.m();
    if m < 3 {
        return Err(Error::UnsupportedDimension(format!(
            "moment-form gap needs ambient dimension >= 3, got {m}"
        )));
    }
    let d = m - 1;
    let moments = moments_up_to(config, kmax)?;
    let mut gap = T::zero();
    for (l, &ml) in moments.iter().enumerate().skip(1) {
        gap += coeff_b(l, d, alpha)? * ml;
    }
    Ok(gap)
}
