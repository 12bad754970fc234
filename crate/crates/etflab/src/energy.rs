//! Scalar energy functionals: symmetric and asymmetric cross-entropy losses,
//! closed-form bounds, frame potential, pair-exponential mean, uniform-measure
//! energy, the energy gap, and the small-alpha Taylor expansion.

use crate::error::{Error, Result};
use crate::quad::integrate_adaptive;
use crate::scalar::{count, real, Real};
use crate::sphere::{dot, Configuration, PairConfiguration};

/// Scale parameter of the energy family.
///
/// `alpha = 0` is accepted by the evaluators (the limits are useful trivial
/// cases) even though the minimization theory requires `alpha > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams<T> {
    alpha: T,
}

impl<T: Real> EnergyParams<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha < T::zero() || !alpha.is_finite() {
            return Err(Error::Parameter(format!("alpha must be >= 0, got {alpha}")));
        }
        Ok(EnergyParams { alpha })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
}

/// All scalar energies of one configuration at one alpha, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport<T> {
    pub loss_sym: T,
    pub lower_bound: T,
    pub jensen_upper: T,
    pub frame_potential: T,
    pub pair_exp_mean: T,
    pub uniform_energy: T,
    pub gap: T,
}

/// Symmetric cross-entropy loss
/// `L_alpha(u) = sum_i log(1 + sum_{j != i} e^{alpha(<u_j,u_i> - 1)})`.
///
/// Exponents are shifted by the row maximum of `alpha * <u_j, u_i>` (the
/// diagonal), which is exactly the `- 1` inside the exponential; each row is
/// then a `log1p` of a sum of terms bounded by 1, so the value stays finite
/// for alpha at least up to 1e4.
pub fn loss_sym<T: Real>(config: &Configuration<T>, alpha: T) -> Result<T> {
    let alpha = EnergyParams::new(alpha)?.alpha();
    Ok(loss_sym_flat(config.flat(), config.n(), config.m(), alpha))
}

/// Raw-row form of [`loss_sym`]; rows need not be normalized. The gradient
/// and finite-difference code differentiate exactly this function.
pub(crate) fn loss_sym_flat<T: Real>(rows: &[T], n: usize, m: usize, alpha: T) -> T {
    let mut total = T::zero();
    for i in 0..n {
        let ui = &rows[i * m..(i + 1) * m];
        // Shifted exponents y_j = alpha*(<u_j,u_i> - 1), plus an implicit
        // e^0 from the "1 +". Drift can push y_j slightly above 0.
        let mut max_y = T::zero();
        for j in 0..n {
            if j != i {
                let y = alpha * (dot(&rows[j * m..(j + 1) * m], ui) - T::one());
                if y > max_y {
                    max_y = y;
                }
            }
        }
        let mut sum = T::zero();
        for j in 0..n {
            if j != i {
                let y = alpha * (dot(&rows[j * m..(j + 1) * m], ui) - T::one());
                sum += (y - max_y).exp();
            }
        }
        total += if max_y == T::zero() {
            sum.ln_1p()
        } else {
            max_y + ((-max_y).exp() + sum).ln()
        };
    }
    total
}

/// Asymmetric cross-entropy loss
/// `L(u, v) = sum_i [logsumexp_j <v_j, u_i> - <v_i, u_i>]`.
///
/// Satisfies `L(u, u) = loss_sym(u, 1)`.
pub fn loss_asym<T: Real>(pair: &PairConfiguration<T>) -> T {
    loss_asym_flat(pair.u().flat(), pair.v().flat(), pair.n(), pair.m())
}

pub(crate) fn loss_asym_flat<T: Real>(urows: &[T], vrows: &[T], n: usize, m: usize) -> T {
    let mut total = T::zero();
    let mut z = vec![T::zero(); n];
    for i in 0..n {
        let ui = &urows[i * m..(i + 1) * m];
        for (j, zj) in z.iter_mut().enumerate() {
            *zj = dot(&vrows[j * m..(j + 1) * m], ui);
        }
        total += logsumexp(&z) - z[i];
    }
    total
}

/// `max + log(sum e^{x - max})` over a non-empty slice.
pub(crate) fn logsumexp<T: Real>(xs: &[T]) -> T {
    let max = xs.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let sum = xs.iter().fold(T::zero(), |a, &b| a + (b - max).exp());
    max + sum.ln()
}

/// Closed-form lower bound `n log(1 + (n-1) e^{-n alpha/(n-1)})`, attained
/// exactly by simplex equiangular tight frames.
pub fn lower_bound_sym<T: Real>(n: usize, alpha: T) -> Result<T> {
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got {n}")));
    }
    let alpha = EnergyParams::new(alpha)?.alpha();
    let nm1 = count::<T>(n - 1);
    let exponent = -count::<T>(n) * alpha / nm1;
    Ok(count::<T>(n) * (nm1 * exponent.exp()).ln_1p())
}

/// Diagonal-inclusive form `sum_i log(sum_j e^{alpha <u_i,u_j>})`;
/// equals `loss_sym + n * alpha`.
pub fn shifted_loss<T: Real>(config: &Configuration<T>, alpha: T) -> Result<T> {
    let alpha = EnergyParams::new(alpha)?.alpha();
    let n = config.n();
    let g = config.gram();
    let mut row = vec![T::zero(); n];
    let mut total = T::zero();
    for i in 0..n {
        for (zj, &gij) in row.iter_mut().zip(g.row(i)) {
            *zj = alpha * gij;
        }
        total += logsumexp(&row);
    }
    Ok(total)
}

/// Jensen upper bound `n log((1/n) sum_{i,j} e^{alpha <u_i,u_j>})`;
/// always >= [`shifted_loss`], with equality at the simplex ETF.
pub fn jensen_upper<T: Real>(config: &Configuration<T>, alpha: T) -> Result<T> {
    let alpha = EnergyParams::new(alpha)?.alpha();
    let n = config.n();
    let g = config.gram();
    let mut max_z = T::neg_infinity();
    for i in 0..n {
        for &gij in g.row(i) {
            max_z = max_z.max(alpha * gij);
        }
    }
    let mut sum = T::zero();
    for i in 0..n {
        for &gij in g.row(i) {
            sum += (alpha * gij - max_z).exp();
        }
    }
    Ok(count::<T>(n) * (max_z + sum.ln() - count::<T>(n).ln()))
}

/// Diagonal-inclusive mean `(1/n^2) sum_{i,j} e^{alpha <u_i,u_j>}`.
pub fn pair_exp_mean<T: Real>(config: &Configuration<T>, alpha: T) -> Result<T> {
    let alpha = EnergyParams::new(alpha)?.alpha();
    Ok(pair_exp_mean_flat(config.flat(), config.n(), config.m(), alpha))
}

pub(crate) fn pair_exp_mean_flat<T: Real>(rows: &[T], n: usize, m: usize, alpha: T) -> T {
    let mut sum = T::zero();
    for i in 0..n {
        let ui = &rows[i * m..(i + 1) * m];
        sum += (alpha * dot(ui, ui)).exp();
        for j in 0..i {
            let g = dot(ui, &rows[j * m..(j + 1) * m]);
            sum += real::<T>(2.0) * (alpha * g).exp();
        }
    }
    sum / (count::<T>(n) * count::<T>(n))
}

/// Frame potential `F = sum_{i,j} <u_i,u_j>^2` (diagonal included); at least
/// `n^2/m`, with equality exactly for tight frames.
pub fn frame_potential<T: Real>(config: &Configuration<T>) -> T {
    let n = config.n();
    let g = config.gram();
    let mut sum = T::zero();
    for i in 0..n {
        for &gij in g.row(i) {
            sum += gij * gij;
        }
    }
    sum
}

/// Mean of `e^{alpha <x,y>}` under the product of uniform measures on
/// S^{m-1}:
///
/// `[A(m-1)/A(m)] * integral_{-1}^{1} e^{alpha t} (1-t^2)^{(m-3)/2} dt`
///
/// with `A(k) = 2 pi^{k/2} / Gamma(k/2)` the area of S^{k-1}. The integral is
/// evaluated after the substitution `t = cos(theta)`, which removes the
/// endpoint singularities of the weight for every m >= 2, by Gauss-Legendre
/// quadrature (64 nodes, doubled until successive estimates agree to 1e-12,
/// at most 4 doublings). The area ratio is computed via log-Gamma.
pub fn uniform_energy<T: Real>(m: usize, alpha: T) -> Result<T> {
    if m < 2 {
        return Err(Error::Parameter(format!("need m >= 2, got {m}")));
    }
    let alpha = EnergyParams::new(alpha)?.alpha();
    if alpha == T::zero() {
        return Ok(T::one());
    }
    let ratio = sphere_ratio::<T>(m);
    let power = (m - 2) as i32;
    let integral = integrate_adaptive(
        |theta: T| (alpha * theta.cos()).exp() * theta.sin().powi(power),
        T::zero(),
        real(std::f64::consts::PI),
        64,
        4,
        1e-12,
    )?;
    Ok(ratio * integral)
}

/// `A(m-1)/A(m) = Gamma(m/2) / (sqrt(pi) Gamma((m-1)/2))`, via log-Gamma.
fn sphere_ratio<T: Real>(m: usize) -> T {
    let half_m = real::<T>(m as f64 / 2.0);
    let half_m1 = real::<T>((m as f64 - 1.0) / 2.0);
    (half_m.lgamma() - half_m1.lgamma() - real::<T>(0.5) * real::<T>(std::f64::consts::PI).ln())
        .exp()
}

/// `pair_exp_mean - uniform_energy`: nonnegative for every configuration
/// (all expansion coefficients of the kernel are positive).
pub fn energy_gap<T: Real>(config: &Configuration<T>, alpha: T) -> Result<T> {
    Ok(pair_exp_mean(config, alpha)? - uniform_energy(config.m(), alpha)?)
}

/// Four-term expansion of [`shifted_loss`] through second order:
///
/// `n log n + (alpha/n) |U|^2 + (alpha^2/2n) F - (alpha^2/2n^2) sum_i <u_i, U>^2`
///
/// with `U` the resultant and `F` the frame potential. The remainder is
/// O(alpha^3).
pub fn taylor_order2<T: Real>(config: &Configuration<T>, alpha: T) -> Result<T> {
    let alpha = EnergyParams::new(alpha)?.alpha();
    let n = count::<T>(config.n());
    let u = config.resultant();
    let resultant_sq = dot(&u, &u);
    let fp = frame_potential(config);
    let row_sq = config
        .rows()
        .fold(T::zero(), |acc, row| acc + dot(row, &u) * dot(row, &u));
    let half = real::<T>(0.5);
    Ok(n * n.ln() + alpha / n * resultant_sq + half * alpha * alpha / n * fp
        - half * alpha * alpha / (n * n) * row_sq)
}

/// Effective small-alpha energy `(alpha/n) |U|^2 + (alpha^2/2n) F`.
pub fn effective_energy<T: Real>(config: &Configuration<T>, alpha: T) -> Result<T> {
    let alpha = EnergyParams::new(alpha)?.alpha();
    let n = count::<T>(config.n());
    let u = config.resultant();
    Ok(alpha / n * dot(&u, &u) + real::<T>(0.5) * alpha * alpha / n * frame_potential(config))
}

/// Assembles the seven reported energies of one configuration.
pub fn energy_report<T: Real>(config: &Configuration<T>, alpha: T) -> Result<EnergyReport<T>> {
    let pair_exp = pair_exp_mean(config, alpha)?;
    let uniform = uniform_energy(config.m(), alpha)?;
    Ok(EnergyReport {
        loss_sym: loss_sym(config, alpha)?,
        lower_bound: lower_bound_sym(config.n(), alpha)?,
        jensen_upper: jensen_upper(config, alpha)?,
        frame_potential: frame_potential(config),
        pair_exp_mean: pair_exp,
        uniform_energy: uniform,
        gap: pair_exp - uniform,
    })
}
