//! Riemannian first-order minimization over products of unit spheres:
//! projected gradient descent with renormalization retraction, backtracking
//! line search, and deterministic multi-restart.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::energy::{logsumexp, loss_asym_flat, loss_sym_flat, pair_exp_mean_flat};
use crate::error::{Error, Result};
use crate::scalar::{count, real, Real};
use crate::sphere::{dot, sample_rows, Configuration, PairConfiguration};

/// Objective selected for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `loss_sym` at the given alpha.
    SymmetricCe,
    /// `loss_asym` over (u, v) jointly; alpha is ignored.
    AsymmetricCe,
    /// `pair_exp_mean` at the given alpha.
    PairExp,
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::SymmetricCe => "sym-ce",
            Objective::AsymmetricCe => "asym-ce",
            Objective::PairExp => "pair-exp",
        }
    }
}

/// Settings for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptParams<T> {
    pub objective: Objective,
    /// Scale parameter; ignored for the asymmetric objective.
    pub alpha: T,
    pub max_iters: usize,
    /// Initial (and maximal) line-search step.
    pub step_size: T,
    /// Convergence threshold on the Riemannian (tangential) gradient norm.
    pub grad_tol: T,
    pub restarts: usize,
    pub seed: u64,
}

impl<T: Real> OptParams<T> {
    /// Defaults matching the CLI: 20000 iterations, step 0.1, tolerance 1e-10,
    /// one restart, seed 0.
    pub fn new(objective: Objective, alpha: T) -> Self {
        OptParams {
            objective,
            alpha,
            max_iters: 20_000,
            step_size: real(0.1),
            grad_tol: real(1e-10),
            restarts: 1,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::Parameter("max_iters must be >= 1".into()));
        }
        if self.restarts < 1 {
            return Err(Error::Parameter("restarts must be >= 1".into()));
        }
        if self.step_size <= T::zero() || self.step_size.is_nan() {
            return Err(Error::Parameter(format!(
                "step_size must be > 0, got {}",
                self.step_size
            )));
        }
        if self.grad_tol <= T::zero() || self.grad_tol.is_nan() {
            return Err(Error::Parameter(format!(
                "grad_tol must be > 0, got {}",
                self.grad_tol
            )));
        }
        if self.objective != Objective::AsymmetricCe && (self.alpha <= T::zero() || self.alpha.is_nan()) {
            return Err(Error::Parameter(format!(
                "alpha must be > 0 for {}, got {}",
                self.objective.name(),
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Either a single configuration or an aligned (u, v) pair; the optimizer
/// input and output carrier.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigOrPair<T> {
    Single(Configuration<T>),
    Pair(PairConfiguration<T>),
}

impl<T: Real> ConfigOrPair<T> {
    pub fn as_single(&self) -> Option<&Configuration<T>> {
        match self {
            ConfigOrPair::Single(c) => Some(c),
            ConfigOrPair::Pair(_) => None,
        }
    }

    pub fn as_pair(&self) -> Option<&PairConfiguration<T>> {
        match self {
            ConfigOrPair::Pair(p) => Some(p),
            ConfigOrPair::Single(_) => None,
        }
    }
}

/// Outcome of [`minimize`]: the best restart and its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult<T> {
    pub best: ConfigOrPair<T>,
    pub best_loss: T,
    pub grad_norm_final: T,
    pub iterations_used: usize,
    pub restart_index: usize,
    pub converged: bool,
    /// (iteration, loss) at iteration 0 and after every accepted step.
    pub trace: Vec<(usize, T)>,
}

/// Ambient gradient of `loss_sym` with respect to every point, as an n x m
/// row-major matrix. With softmax-style weights
/// `w_ij = e^{alpha(<u_j,u_i> - 1)} / (1 + sum_{l != i} e^{alpha(<u_l,u_i> - 1)})`
/// the gradient at `u_k` is
/// `alpha (sum_{j != k} w_kj u_j + sum_{i != k} w_ik u_i)`.
pub fn grad_sym<T: Real>(config: &Configuration<T>, alpha: T) -> Result<Vec<T>> {
    if alpha <= T::zero() || alpha.is_nan() {
        return Err(Error::Parameter(format!("alpha must be > 0, got {alpha}")));
    }
    Ok(grad_sym_flat(config.flat(), config.n(), config.m(), alpha))
}

fn grad_sym_flat<T: Real>(rows: &[T], n: usize, m: usize, alpha: T) -> Vec<T> {
    // Row denominators sigma_i = 1 + sum_{l != i} e^{alpha(<u_l,u_i> - 1)}.
    let mut sigma = vec![T::one(); n];
    for i in 0..n {
        let ui = &rows[i * m..(i + 1) * m];
        for j in 0..n {
            if j != i {
                sigma[i] += (alpha * (dot(&rows[j * m..(j + 1) * m], ui) - T::one())).exp();
            }
        }
    }
    let mut grad = vec![T::zero(); n * m];
    for i in 0..n {
        let ui = &rows[i * m..(i + 1) * m];
        for j in 0..n {
            if j == i {
                continue;
            }
            let uj = &rows[j * m..(j + 1) * m];
            let w = (alpha * (dot(uj, ui) - T::one())).exp() / sigma[i];
            // Term with k = i from the i-th row, and k = j from w_ij u_i.
            for c in 0..m {
                grad[i * m + c] += alpha * w * uj[c];
                grad[j * m + c] += alpha * w * ui[c];
            }
        }
    }
    grad
}

/// Ambient gradients of `loss_asym` with respect to u and v. With
/// `p_ij = softmax_j(<v_j, u_i>)`:
/// `d/du_k = sum_j p_kj v_j - v_k` and `d/dv_k = sum_i p_ik u_i - u_k`.
pub fn grad_asym<T: Real>(pair: &PairConfiguration<T>) -> (Vec<T>, Vec<T>) {
    let (n, m) = (pair.n(), pair.m());
    grad_asym_flat(pair.u().flat(), pair.v().flat(), n, m)
}

fn grad_asym_flat<T: Real>(urows: &[T], vrows: &[T], n: usize, m: usize) -> (Vec<T>, Vec<T>) {
    let mut grad_u = vec![T::zero(); n * m];
    let mut grad_v = vec![T::zero(); n * m];
    let mut z = vec![T::zero(); n];
    for i in 0..n {
        let ui = &urows[i * m..(i + 1) * m];
        for (j, zj) in z.iter_mut().enumerate() {
            *zj = dot(&vrows[j * m..(j + 1) * m], ui);
        }
        let lse = logsumexp(&z);
        for j in 0..n {
            let p = (z[j] - lse).exp();
            let vj = &vrows[j * m..(j + 1) * m];
            for c in 0..m {
                grad_u[i * m + c] += p * vj[c];
                grad_v[j * m + c] += p * ui[c];
            }
        }
        let vi = &vrows[i * m..(i + 1) * m];
        for c in 0..m {
            grad_u[i * m + c] -= vi[c];
            grad_v[i * m + c] -= ui[c];
        }
    }
    (grad_u, grad_v)
}

/// Ambient gradient of `pair_exp_mean`:
/// `d/du_k = (2 alpha / n^2) sum_j e^{alpha <u_k,u_j>} u_j` (j = k included).
pub fn grad_pair_exp<T: Real>(config: &Configuration<T>, alpha: T) -> Result<Vec<T>> {
    if alpha <= T::zero() || alpha.is_nan() {
        return Err(Error::Parameter(format!("alpha must be > 0, got {alpha}")));
    }
    Ok(grad_pair_exp_flat(config.flat(), config.n(), config.m(), alpha))
}

fn grad_pair_exp_flat<T: Real>(rows: &[T], n: usize, m: usize, alpha: T) -> Vec<T> {
    let scale = real::<T>(2.0) * alpha / (count::<T>(n) * count::<T>(n));
    let mut grad = vec![T::zero(); n * m];
    for k in 0..n {
        let uk = &rows[k * m..(k + 1) * m];
        for j in 0..n {
            let uj = &rows[j * m..(j + 1) * m];
            let w = scale * (alpha * dot(uk, uj)).exp();
            for c in 0..m {
                grad[k * m + c] += w * uj[c];
            }
        }
    }
    grad
}

/// Projects an ambient n x m gradient onto the product of tangent spaces:
/// row k becomes `g_k - <g_k, u_k> u_k`.
pub fn tangent_project<T: Real>(config: &Configuration<T>, ambient: &[T]) -> Result<Vec<T>> {
    let (n, m) = (config.n(), config.m());
    if ambient.len() != n * m {
        return Err(Error::ShapeMismatch(format!(
            "gradient has {} entries, expected {} x {}",
            ambient.len(),
            n,
            m
        )));
    }
    let mut out = ambient.to_vec();
    project_rows(config.flat(), &mut out, m);
    Ok(out)
}

fn project_rows<T: Real>(rows: &[T], grad: &mut [T], m: usize) {
    for (row, g) in rows.chunks(m).zip(grad.chunks_mut(m)) {
        let radial = dot(g, row);
        for (gc, &rc) in g.iter_mut().zip(row) {
            *gc -= radial * rc;
        }
    }
}

/// Central finite differences of `loss_sym` along each ambient coordinate,
/// the verification oracle for [`grad_sym`]. Requires h in [1e-8, 1e-3].
pub fn finite_diff_grad<T: Real>(config: &Configuration<T>, alpha: T, h: T) -> Result<Vec<T>> {
    check_fd_step(h)?;
    let (n, m) = (config.n(), config.m());
    let mut rows = config.flat().to_vec();
    let mut out = vec![T::zero(); n * m];
    for idx in 0..n * m {
        let saved = rows[idx];
        rows[idx] = saved + h;
        let plus = loss_sym_flat(&rows, n, m, alpha);
        rows[idx] = saved - h;
        let minus = loss_sym_flat(&rows, n, m, alpha);
        rows[idx] = saved;
        out[idx] = (plus - minus) / (real::<T>(2.0) * h);
    }
    Ok(out)
}

/// Central finite differences of `loss_asym` along every coordinate of u
/// and v; the oracle for [`grad_asym`].
pub fn finite_diff_grad_asym<T: Real>(
    pair: &PairConfiguration<T>,
    h: T,
) -> Result<(Vec<T>, Vec<T>)> {
    check_fd_step(h)?;
    let (n, m) = (pair.n(), pair.m());
    let mut urows = pair.u().flat().to_vec();
    let mut vrows = pair.v().flat().to_vec();
    let two_h = real::<T>(2.0) * h;
    let mut grad_u = vec![T::zero(); n * m];
    let mut grad_v = vec![T::zero(); n * m];
    for idx in 0..n * m {
        let saved = urows[idx];
        urows[idx] = saved + h;
        let plus = loss_asym_flat(&urows, &vrows, n, m);
        urows[idx] = saved - h;
        let minus = loss_asym_flat(&urows, &vrows, n, m);
        urows[idx] = saved;
        grad_u[idx] = (plus - minus) / two_h;

        let saved = vrows[idx];
        vrows[idx] = saved + h;
        let plus = loss_asym_flat(&urows, &vrows, n, m);
        vrows[idx] = saved - h;
        let minus = loss_asym_flat(&urows, &vrows, n, m);
        vrows[idx] = saved;
        grad_v[idx] = (plus - minus) / two_h;
    }
    Ok((grad_u, grad_v))
}

fn check_fd_step<T: Real>(h: T) -> Result<()> {
    if h < real(1e-8) || h > real(1e-3) {
        return Err(Error::Parameter(format!(
            "finite-difference step {h} outside [1e-8, 1e-3]"
        )));
    }
    Ok(())
}

enum Kernel<T> {
    Sym { alpha: T, n: usize },
    Asym { n: usize },
    PairExp { alpha: T, n: usize },
}

impl<T: Real> Kernel<T> {
    fn loss(&self, rows: &[T], m: usize) -> T {
        match *self {
            Kernel::Sym { alpha, n } => loss_sym_flat(rows, n, m, alpha),
            Kernel::Asym { n } => loss_asym_flat(&rows[..n * m], &rows[n * m..], n, m),
            Kernel::PairExp { alpha, n } => pair_exp_mean_flat(rows, n, m, alpha),
        }
    }

    fn ambient_grad(&self, rows: &[T], m: usize) -> Vec<T> {
        match *self {
            Kernel::Sym { alpha, n } => grad_sym_flat(rows, n, m, alpha),
            Kernel::Asym { n } => {
                let (mut gu, gv) = grad_asym_flat(&rows[..n * m], &rows[n * m..], n, m);
                gu.extend(gv);
                gu
            }
            Kernel::PairExp { alpha, n } => grad_pair_exp_flat(rows, n, m, alpha),
        }
    }
}

struct RestartRun<T> {
    rows: Vec<T>,
    loss: T,
    grad_norm: T,
    iterations: usize,
    converged: bool,
    trace: Vec<(usize, T)>,
}

/// Minimizes the selected objective by projected gradient descent with
/// renormalization retraction and backtracking line search (step halves
/// until the loss decreases, grows by 1.5 after success, capped at the
/// initial step). Convergence is declared on the Riemannian gradient norm.
///
/// Restart 0 starts from `init`; restart i >= 1 starts from a fresh uniform
/// sample whose seed is derived from `(params.seed, i)` only, so the result
/// does not depend on how restarts are scheduled. The best restart wins,
/// ties broken by the lower restart index.
///
/// ```
/// use etflab::optimize::{minimize, ConfigOrPair, Objective, OptParams};
/// use etflab::sphere::sample_uniform;
///
/// let init = ConfigOrPair::Single(sample_uniform::<f64>(3, 2, 1)?);
/// let mut params = OptParams::new(Objective::SymmetricCe, 1.0);
/// params.restarts = 4;
/// let result = minimize(&init, &params)?;
/// let bound = etflab::energy::lower_bound_sym::<f64>(3, 1.0)?;
/// assert!(result.best_loss >= bound - 1e-9);
/// assert!(result.best_loss - bound < 1e-6);
/// # Ok::<(), etflab::Error>(())
/// ```
pub fn minimize<T: Real>(init: &ConfigOrPair<T>, params: &OptParams<T>) -> Result<OptResult<T>> {
    params.validate()?;
    let (kernel, n_points, m) = match (params.objective, init) {
        (Objective::SymmetricCe, ConfigOrPair::Single(c)) => (
            Kernel::Sym { alpha: params.alpha, n: c.n() },
            c.n(),
            c.m(),
        ),
        (Objective::PairExp, ConfigOrPair::Single(c)) => (
            Kernel::PairExp { alpha: params.alpha, n: c.n() },
            c.n(),
            c.m(),
        ),
        (Objective::AsymmetricCe, ConfigOrPair::Pair(p)) => {
            (Kernel::Asym { n: p.n() }, p.n(), p.m())
        }
        (obj, _) => {
            return Err(Error::Parameter(format!(
                "objective {} does not match the provided initial value",
                obj.name()
            )));
        }
    };
    let n_rows = match params.objective {
        Objective::AsymmetricCe => 2 * n_points,
        _ => n_points,
    };
    let init_rows: Vec<T> = match init {
        ConfigOrPair::Single(c) => c.flat().to_vec(),
        ConfigOrPair::Pair(p) => {
            let mut rows = p.u().flat().to_vec();
            rows.extend_from_slice(p.v().flat());
            rows
        }
    };

    let runs: Vec<RestartRun<T>> = (0..params.restarts)
        .into_par_iter()
        .map(|idx| {
            let rows = if idx == 0 {
                init_rows.clone()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, idx as u64));
                sample_rows::<T>(&mut rng, n_rows, m).flat().to_vec()
            };
            run_restart(&kernel, rows, m, params)
        })
        .collect();

    let mut best_idx = 0;
    for (idx, run) in runs.iter().enumerate().skip(1) {
        if run.loss < runs[best_idx].loss {
            best_idx = idx;
        }
    }
    let run = &runs[best_idx];
    let best = match params.objective {
        Objective::AsymmetricCe => {
            let u = Configuration::from_flat_normalized(
                run.rows[..n_points * m].to_vec(),
                n_points,
                m,
            )?;
            let v = Configuration::from_flat_normalized(
                run.rows[n_points * m..].to_vec(),
                n_points,
                m,
            )?;
            ConfigOrPair::Pair(PairConfiguration::new(u, v)?)
        }
        _ => ConfigOrPair::Single(Configuration::from_flat_normalized(
            run.rows.clone(),
            n_points,
            m,
        )?),
    };
    Ok(OptResult {
        best,
        best_loss: run.loss,
        grad_norm_final: run.grad_norm,
        iterations_used: run.iterations,
        restart_index: best_idx,
        converged: run.converged,
        trace: run.trace.clone(),
    })
}

fn run_restart<T: Real>(
    kernel: &Kernel<T>,
    mut rows: Vec<T>,
    m: usize,
    params: &OptParams<T>,
) -> RestartRun<T> {
    let mut loss = kernel.loss(&rows, m);
    let mut step = params.step_size;
    let mut trace = vec![(0usize, loss)];
    let mut grad_norm = T::infinity();
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=params.max_iters {
        let mut grad = kernel.ambient_grad(&rows, m);
        project_rows(&rows, &mut grad, m);
        grad_norm = dot(&grad, &grad).sqrt();
        if grad_norm <= params.grad_tol {
            converged = true;
            break;
        }
        let mut accepted = false;
        loop {
            let candidate = retract(&rows, &grad, step, m);
            let candidate_loss = kernel.loss(&candidate, m);
            if candidate_loss < loss {
                rows = candidate;
                loss = candidate_loss;
                step = (step * real(1.5)).min(params.step_size);
                accepted = true;
                break;
            }
            step *= real(0.5);
            if step < real(1e-16) {
                break;
            }
        }
        iterations = iter;
        if !accepted {
            // Line search stalled: report as non-converged rather than error.
            break;
        }
        trace.push((iter, loss));
        if iter == params.max_iters {
            // Final gradient norm at the point actually returned.
            let mut grad = kernel.ambient_grad(&rows, m);
            project_rows(&rows, &mut grad, m);
            grad_norm = dot(&grad, &grad).sqrt();
        }
    }

    RestartRun { rows, loss, grad_norm, iterations, converged, trace }
}

/// Step along the (negative) tangential direction, then renormalize each row.
fn retract<T: Real>(rows: &[T], grad: &[T], step: T, m: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(rows.len());
    for (row, g) in rows.chunks(m).zip(grad.chunks(m)) {
        let start = out.len();
        for (&rc, &gc) in row.iter().zip(g) {
            out.push(rc - step * gc);
        }
        let norm = dot(&out[start..], &out[start..]).sqrt();
        for c in &mut out[start..] {
            *c /= norm;
        }
    }
    out
}

fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::lower_bound_sym;
    use crate::sphere::{etf_distance, sample_uniform, simplex_etf};

    fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| (x - y).abs() / y.abs().max(1.0))
            .fold(0.0, f64::max)
    }

    #[test]
    fn etf_is_a_critical_point() {
        let etf = simplex_etf::<f64>(4, 3).unwrap();
        let g = grad_sym(&etf, 1.0).unwrap();
        let tangential = tangent_project(&etf, &g).unwrap();
        let norm = dot(&tangential, &tangential).sqrt();
        assert!(norm < 1e-8, "tangential norm {norm}");
    }

    #[test]
    fn antipodal_pair_is_critical_for_any_alpha() {
        let pair = simplex_etf::<f64>(2, 2).unwrap();
        for alpha in [0.5, 1.0, 7.0] {
            let g = grad_sym(&pair, alpha).unwrap();
            let t = tangent_project(&pair, &g).unwrap();
            assert!(dot(&t, &t).sqrt() < 1e-10);
        }
    }

    #[test]
    fn grad_sym_rejects_nonpositive_alpha() {
        let c = sample_uniform::<f64>(3, 3, 0).unwrap();
        assert!(grad_sym(&c, 0.0).is_err());
        assert!(grad_sym(&c, -1.0).is_err());
    }

    #[test]
    fn grad_sym_matches_finite_differences() {
        let c = sample_uniform::<f64>(5, 4, 13).unwrap();
        let analytic = grad_sym(&c, 2.0).unwrap();
        let fd = finite_diff_grad(&c, 2.0, 1e-6).unwrap();
        let err = max_rel_err(&analytic, &fd);
        assert!(err < 1e-5, "max relative error {err}");
    }

    #[test]
    fn grad_sym_fd_sweep() {
        for seed in 0..25u64 {
            let n = 2 + (seed % 5) as usize;
            let m = 2 + (seed % 4) as usize;
            let alpha = 0.2 + 2.8 * (seed as f64 / 25.0);
            let c = sample_uniform::<f64>(n, m, seed).unwrap();
            let analytic = grad_sym(&c, alpha).unwrap();
            let fd = finite_diff_grad(&c, alpha, 1e-6).unwrap();
            let err = max_rel_err(&analytic, &fd);
            assert!(err < 1e-5, "seed {seed}: error {err}");
        }
    }

    #[test]
    fn grad_asym_matches_finite_differences() {
        for seed in 0..10u64 {
            let u = sample_uniform::<f64>(4, 3, seed).unwrap();
            let v = sample_uniform::<f64>(4, 3, seed + 1000).unwrap();
            let pair = PairConfiguration::new(u, v).unwrap();
            let (gu, gv) = grad_asym(&pair);
            let (fu, fv) = finite_diff_grad_asym(&pair, 1e-6).unwrap();
            assert!(max_rel_err(&gu, &fu) < 1e-5, "u gradient, seed {seed}");
            assert!(max_rel_err(&gv, &fv) < 1e-5, "v gradient, seed {seed}");
        }
    }

    #[test]
    fn grad_pair_exp_matches_finite_differences() {
        let c = sample_uniform::<f64>(5, 3, 3).unwrap();
        let alpha = 1.3;
        let analytic = grad_pair_exp(&c, alpha).unwrap();
        let mut rows = c.flat().to_vec();
        let h = 1e-6;
        for idx in 0..rows.len() {
            let saved = rows[idx];
            rows[idx] = saved + h;
            let plus = pair_exp_mean_flat(&rows, 5, 3, alpha);
            rows[idx] = saved - h;
            let minus = pair_exp_mean_flat(&rows, 5, 3, alpha);
            rows[idx] = saved;
            let fd = (plus - minus) / (2.0 * h);
            assert!((analytic[idx] - fd).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn finite_differences_see_the_etf_as_critical() {
        let etf = simplex_etf::<f64>(4, 3).unwrap();
        let fd = finite_diff_grad(&etf, 1.0, 1e-6).unwrap();
        let tangential = tangent_project(&etf, &fd).unwrap();
        assert!(dot(&tangential, &tangential).sqrt() < 1e-6);
    }

    #[test]
    fn finite_diff_step_range() {
        let c = sample_uniform::<f64>(3, 3, 0).unwrap();
        assert!(finite_diff_grad(&c, 1.0, 1.0).is_err());
        assert!(finite_diff_grad(&c, 1.0, 1e-9).is_err());
        assert!(finite_diff_grad(&c, 1.0, 1e-4).is_ok());
    }

    #[test]
    fn tangent_projection_properties() {
        let c = sample_uniform::<f64>(4, 3, 7).unwrap();
        // Radial input vanishes.
        let radial = c.flat().to_vec();
        let projected = tangent_project(&c, &radial).unwrap();
        assert!(dot(&projected, &projected).sqrt() < 1e-14);
        // Projection leaves tangential input unchanged and is idempotent.
        let g = grad_sym(&c, 1.0).unwrap();
        let t1 = tangent_project(&c, &g).unwrap();
        let t2 = tangent_project(&c, &t1).unwrap();
        for (a, b) in t1.iter().zip(&t2) {
            assert!((a - b).abs() < 1e-15);
        }
        // Output rows are orthogonal to their points.
        for (row, t) in c.rows().zip(t1.chunks(3)) {
            assert!(dot(row, t).abs() < 1e-12);
        }
        // Shape mismatch is rejected.
        assert!(tangent_project(&c, &[0.0; 5]).is_err());
    }

    #[test]
    fn minimize_recovers_tetrahedron() {
        let init = sample_uniform::<f64>(4, 3, 42).unwrap();
        let mut params = OptParams::new(Objective::SymmetricCe, 1.0);
        params.restarts = 20;
        params.seed = 42;
        let result = minimize(&ConfigOrPair::Single(init), &params).unwrap();
        let bound = lower_bound_sym::<f64>(4, 1.0).unwrap();
        assert!(
            (result.best_loss - bound).abs() < 1e-7,
            "loss {} vs bound {bound}",
            result.best_loss
        );
        let best = result.best.as_single().unwrap();
        assert!(etf_distance(best).unwrap() < 1e-4);
        assert!(result.best_loss >= bound - 1e-9);
    }

    #[test]
    fn minimize_trace_is_monotone_and_feasible() {
        let init = sample_uniform::<f64>(6, 3, 5).unwrap();
        let mut params = OptParams::new(Objective::SymmetricCe, 2.0);
        params.max_iters = 300;
        let result = minimize(&ConfigOrPair::Single(init), &params).unwrap();
        for w in result.trace.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-12, "trace rose: {w:?}");
        }
        let best = result.best.as_single().unwrap();
        for row in best.rows() {
            assert!((dot(row, row).sqrt() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn minimize_is_deterministic() {
        let init = sample_uniform::<f64>(5, 4, 9).unwrap();
        let mut params = OptParams::new(Objective::SymmetricCe, 1.0);
        params.restarts = 4;
        params.max_iters = 500;
        params.seed = 11;
        let a = minimize(&ConfigOrPair::Single(init.clone()), &params).unwrap();
        let b = minimize(&ConfigOrPair::Single(init), &params).unwrap();
        assert_eq!(a.best_loss.to_bits(), b.best_loss.to_bits());
        assert_eq!(a.restart_index, b.restart_index);
        assert_eq!(a.iterations_used, b.iterations_used);
        let (ca, cb) = (a.best.as_single().unwrap(), b.best.as_single().unwrap());
        assert_eq!(ca.flat(), cb.flat());
    }

    #[test]
    fn minimize_asym_collapses_to_symmetric_solution() {
        let u = sample_uniform::<f64>(3, 4, 1).unwrap();
        let v = sample_uniform::<f64>(3, 4, 2).unwrap();
        let init = ConfigOrPair::Pair(PairConfiguration::new(u, v).unwrap());
        let mut params = OptParams::new(Objective::AsymmetricCe, 1.0);
        params.restarts = 8;
        params.seed = 3;
        let result = minimize(&init, &params).unwrap();
        let pair = result.best.as_pair().unwrap();
        for i in 0..3 {
            let align = dot(pair.u().point(i), pair.v().point(i));
            assert!(align > 1.0 - 1e-4, "point {i} alignment {align}");
        }
        assert!(etf_distance(pair.u()).unwrap() < 1e-3);
    }

    #[test]
    fn minimize_rejects_mismatched_init() {
        let c = sample_uniform::<f64>(3, 3, 0).unwrap();
        let params = OptParams::new(Objective::AsymmetricCe, 1.0);
        assert!(minimize(&ConfigOrPair::Single(c.clone()), &params).is_err());
        let pair = PairConfiguration::new(c.clone(), c).unwrap();
        let params = OptParams::new(Objective::SymmetricCe, 1.0);
        assert!(minimize(&ConfigOrPair::Pair(pair), &params).is_err());
    }

    #[test]
    fn minimize_validates_params() {
        let c = sample_uniform::<f64>(3, 3, 0).unwrap();
        let init = ConfigOrPair::Single(c);
        let mut params = OptParams::new(Objective::SymmetricCe, 1.0);
        params.restarts = 0;
        assert!(minimize(&init, &params).is_err());
        let mut params = OptParams::new(Objective::SymmetricCe, 1.0);
        params.step_size = 0.0;
        assert!(minimize(&init, &params).is_err());
        let params = OptParams::new(Objective::SymmetricCe, 0.0);
        assert!(minimize(&init, &params).is_err());
    }

    #[test]
    fn minimizer_works_in_single_precision() {
        let init = sample_uniform::<f32>(4, 3, 42).unwrap();
        let mut params = OptParams::new(Objective::SymmetricCe, 1.0f32);
        params.grad_tol = 1e-4;
        params.restarts = 8;
        params.max_iters = 2000;
        params.seed = 42;
        let result = minimize(&ConfigOrPair::Single(init), &params).unwrap();
        let bound = lower_bound_sym::<f32>(4, 1.0).unwrap();
        assert!(
            (result.best_loss - bound).abs() < 1e-4,
            "f32 loss {} vs bound {bound}",
            result.best_loss
        );
    }

    #[test]
    fn pair_exp_objective_shrinks_the_gap() {
        use crate::energy::energy_gap;
        let init = sample_uniform::<f64>(12, 3, 20).unwrap();
        let random_gap = energy_gap(&init, 1.0).unwrap();
        let mut params = OptParams::new(Objective::PairExp, 1.0);
        params.max_iters = 3000;
        let result = minimize(&ConfigOrPair::Single(init), &params).unwrap();
        let optimized_gap = energy_gap(result.best.as_single().unwrap(), 1.0).unwrap();
        assert!(optimized_gap >= -1e-9);
        assert!(
            optimized_gap < random_gap / 10.0,
            "optimized {optimized_gap} vs random {random_gap}"
        );
    }
}
