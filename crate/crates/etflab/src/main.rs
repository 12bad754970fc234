//! Command-line experiment runner: reproducible, file-backed experiments
//! over the library's energies, optimizers and expansions.
//!
//! Exit codes: 0 success, 1 usage/parameter error, 2 numeric failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use etflab::energy::{energy_gap, energy_report, lower_bound_sym, shifted_loss, taylor_order2, uniform_energy};
use etflab::gegenbauer::{coeff_b, decay_diagnostic};
use etflab::json::{
    configuration_from_json, to_json_string, EnergyReportJson, OptResultJson, UniformityReportJson,
};
use etflab::optimize::{minimize, ConfigOrPair, Objective, OptParams, OptResult};
use etflab::sphere::{etf_distance, sample_uniform, sample_uniform_pair};
use etflab::uniformity::{uniformity_report, vmf_energy};
use etflab::{Error, Result};

#[derive(Parser)]
#[command(name = "etflab", version, about = "Spherical cross-entropy energies: optimization, diagnostics, expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize an energy over unit-vector configurations
    Optimize(OptimizeArgs),
    /// Energy and uniformity report for a configuration file
    Report(ReportArgs),
    /// Expansion coefficient table b_k with the decay diagnostic
    Gegenbauer(GegenbauerArgs),
    /// Random-vs-optimized energy gap across point counts
    GapSweep(GapSweepArgs),
    /// Accuracy table of the second-order Taylor expansion
    TaylorCheck(TaylorCheckArgs),
    /// von Mises-Fisher energy across concentrations
    VmfCheck(VmfCheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliObjective {
    SymCe,
    AsymCe,
    PairExp,
}

impl From<CliObjective> for Objective {
    fn from(o: CliObjective) -> Objective {
        match o {
            CliObjective::SymCe => Objective::SymmetricCe,
            CliObjective::AsymCe => Objective::AsymmetricCe,
            CliObjective::PairExp => Objective::PairExp,
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, value_enum)]
    objective: CliObjective,
    /// Number of points
    #[arg(long)]
    n: usize,
    /// Ambient dimension
    #[arg(long)]
    dim: usize,
    /// Scale parameter (ignored by asym-ce)
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    /// Initial line-search step
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Riemannian gradient norm threshold
    #[arg(long, default_value_t = 1e-10)]
    grad_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Configuration JSON file
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Largest moment degree in the uniformity section
    #[arg(long, default_value_t = 8)]
    lmax: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GegenbauerArgs {
    /// Sphere parameter d (ambient dimension d+1)
    #[arg(long)]
    d: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    kmax: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GapSweepArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    alpha: f64,
    /// Comma-separated point counts
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TaylorCheckArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated alpha values
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VmfCheckArgs {
    #[arg(long)]
    alpha: f64,
    /// Comma-separated concentration values
    #[arg(long, value_delimiter = ',')]
    kappas: Vec<f64>,
    #[arg(long, default_value_t = 128)]
    nodes: usize,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("etflab: {err}");
            ExitCode::from(if err.is_numeric() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Optimize(args) => run_optimize(args),
        Command::Report(args) => run_report(args),
        Command::Gegenbauer(args) => run_gegenbauer(args),
        Command::GapSweep(args) => run_gap_sweep(args),
        Command::TaylorCheck(args) => run_taylor_check(args),
        Command::VmfCheck(args) => run_vmf_check(args),
    }
}

#[derive(Serialize)]
struct OptimizeSpec {
    command: &'static str,
    objective: String,
    n: usize,
    dim: usize,
    alpha: f64,
    restarts: usize,
    max_iters: usize,
    step: f64,
    grad_tol: f64,
    seed: u64,
}

/// Comparison of a result against the simplex-ETF characterization; the
/// comparison is flagged infeasible (null distance) when n > dim + 1.
#[derive(Serialize)]
struct EtfBlock {
    feasible: bool,
    distance: Option<f64>,
    lower_bound: Option<f64>,
    gap_to_bound: Option<f64>,
    min_align: Option<f64>,
}

#[derive(Serialize)]
struct OptimizeOutput {
    spec: OptimizeSpec,
    #[serde(flatten)]
    result: OptResultJson,
    etf: EtfBlock,
}

fn run_optimize(args: OptimizeArgs) -> Result<()> {
    let objective: Objective = args.objective.into();
    let init = match objective {
        Objective::AsymmetricCe => {
            ConfigOrPair::Pair(sample_uniform_pair::<f64>(args.n, args.dim, args.seed)?)
        }
        _ => ConfigOrPair::Single(sample_uniform::<f64>(args.n, args.dim, args.seed)?),
    };
    let params = OptParams {
        objective,
        alpha: args.alpha,
        max_iters: args.max_iters,
        step_size: args.step,
        grad_tol: args.grad_tol,
        restarts: args.restarts,
        seed: args.seed,
    };
    let result = minimize(&init, &params)?;
    let etf = etf_block(&result, objective, args.alpha)?;
    let spec = OptimizeSpec {
        command: "optimize",
        objective: objective.name().to_string(),
        n: args.n,
        dim: args.dim,
        alpha: args.alpha,
        restarts: args.restarts,
        max_iters: args.max_iters,
        step: args.step,
        grad_tol: args.grad_tol,
        seed: args.seed,
    };
    let summary = format!(
        "optimize {} n={} dim={} alpha={} best_loss={:.6e} converged={} etf_distance={} -> {}",
        objective.name(),
        args.n,
        args.dim,
        args.alpha,
        result.best_loss,
        result.converged,
        etf.distance
            .map_or_else(|| "infeasible".to_string(), |d| format!("{d:.3e}")),
        args.out.display()
    );
    let output = OptimizeOutput {
        spec,
        result: OptResultJson::from_result(&result, objective, args.alpha),
        etf,
    };
    write_output(&args.out, &to_json_string(&output))?;
    println!("{summary}");
    Ok(())
}

fn etf_block(result: &OptResult<f64>, objective: Objective, alpha: f64) -> Result<EtfBlock> {
    let (config, min_align) = match &result.best {
        ConfigOrPair::Single(c) => (c, None),
        ConfigOrPair::Pair(p) => (p.u(), Some(p.min_alignment())),
    };
    let feasible = config.n() <= config.m() + 1;
    let distance = if feasible {
        Some(etf_distance(config)?)
    } else {
        None
    };
    let lower_bound = match objective {
        Objective::SymmetricCe => Some(lower_bound_sym::<f64>(config.n(), alpha)?),
        Objective::AsymmetricCe => Some(lower_bound_sym::<f64>(config.n(), 1.0)?),
        Objective::PairExp => Some(uniform_energy::<f64>(config.m(), alpha)?),
    };
    Ok(EtfBlock {
        feasible,
        distance,
        lower_bound,
        gap_to_bound: lower_bound.map(|b| result.best_loss - b),
        min_align,
    })
}

#[derive(Serialize)]
struct ReportSpec {
    command: &'static str,
    input: String,
    alpha: f64,
    lmax: usize,
}

#[derive(Serialize)]
struct ReportOutput {
    spec: ReportSpec,
    energy: EnergyReportJson,
    uniformity: Option<UniformityReportJson>,
    etf: EtfBlock,
}

fn run_report(args: ReportArgs) -> Result<()> {
    let text = read_input(&args.input)?;
    let config = configuration_from_json(&text)?;
    let energy = energy_report(&config, args.alpha)?;
    let uniformity = if config.m() >= 3 {
        Some(UniformityReportJson::from_report(&uniformity_report(
            &config, args.lmax,
        )?))
    } else {
        None
    };
    let feasible = config.n() <= config.m() + 1;
    let etf = EtfBlock {
        feasible,
        distance: if feasible { Some(etf_distance(&config)?) } else { None },
        lower_bound: Some(energy.lower_bound),
        gap_to_bound: Some(energy.loss_sym - energy.lower_bound),
        min_align: None,
    };
    let output = ReportOutput {
        spec: ReportSpec {
            command: "report",
            input: args.input.display().to_string(),
            alpha: args.alpha,
            lmax: args.lmax,
        },
        energy: EnergyReportJson::from_report(&energy),
        uniformity,
        etf,
    };
    write_output(&args.out, &to_json_string(&output))?;
    println!(
        "report n={} m={} alpha={} loss_sym={:.6e} gap={:.3e} -> {}",
        config.n(),
        config.m(),
        args.alpha,
        energy.loss_sym,
        energy.gap,
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct GegenbauerSpec {
    command: &'static str,
    d: usize,
    alpha: f64,
    kmax: usize,
}

fn run_gegenbauer(args: GegenbauerArgs) -> Result<()> {
    let spec = GegenbauerSpec {
        command: "gegenbauer",
        d: args.d,
        alpha: args.alpha,
        kmax: args.kmax,
    };
    let coeffs: Vec<f64> = (0..=args.kmax)
        .map(|k| coeff_b::<f64>(k, args.d, args.alpha))
        .collect::<Result<_>>()?;
    let decay: Vec<f64> = if args.kmax >= 2 {
        decay_diagnostic::<f64>(args.d, args.alpha, 2, args.kmax)?
    } else {
        Vec::new()
    };
    let mut csv = format!("# {}\nk,b_k,log_inv_bk_over_klogk\n", to_json_string(&spec));
    for (k, b) in coeffs.iter().enumerate() {
        if k < 2 {
            csv.push_str(&format!("{k},{b:.16e},\n"));
        } else {
            csv.push_str(&format!("{k},{b:.16e},{:.16e}\n", decay[k - 2]));
        }
    }
    write_output(&args.out, &csv)?;
    println!(
        "gegenbauer d={} alpha={} kmax={} rows={} all_positive={} -> {}",
        args.d,
        args.alpha,
        args.kmax,
        coeffs.len(),
        coeffs.iter().all(|&b| b > 0.0),
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct GapSweepSpec {
    command: &'static str,
    dim: usize,
    alpha: f64,
    n_list: Vec<usize>,
    restarts: usize,
    seed: u64,
}

/// Random baselines average the gap over this many seeded configurations.
const GAP_SWEEP_BASELINE_SAMPLES: u64 = 10;

fn run_gap_sweep(args: GapSweepArgs) -> Result<()> {
    if args.n_list.is_empty() {
        return Err(Error::Parameter("--n-list must not be empty".into()));
    }
    let spec = GapSweepSpec {
        command: "gap-sweep",
        dim: args.dim,
        alpha: args.alpha,
        n_list: args.n_list.clone(),
        restarts: args.restarts,
        seed: args.seed,
    };
    let mut csv = format!("# {}\nn,gap_random_mean,gap_optimized\n", to_json_string(&spec));
    let mut summary_pairs = Vec::new();
    for (idx, &n) in args.n_list.iter().enumerate() {
        let idx = idx as u64;
        let mut random_sum = 0.0;
        for k in 0..GAP_SWEEP_BASELINE_SAMPLES {
            let c = sample_uniform::<f64>(n, args.dim, mix(args.seed, idx, k))?;
            random_sum += energy_gap(&c, args.alpha)?;
        }
        let random_mean = random_sum / GAP_SWEEP_BASELINE_SAMPLES as f64;

        let init = sample_uniform::<f64>(n, args.dim, mix(args.seed, idx, 1_000))?;
        let params = OptParams {
            objective: Objective::PairExp,
            alpha: args.alpha,
            max_iters: 20_000,
            step_size: 0.1,
            grad_tol: 1e-9,
            restarts: args.restarts,
            seed: mix(args.seed, idx, 2_000),
        };
        let result = minimize(&ConfigOrPair::Single(init), &params)?;
        let optimized = energy_gap(
            result.best.as_single().expect("pair-exp yields a single configuration"),
            args.alpha,
        )?;
        csv.push_str(&format!("{n},{random_mean:.16e},{optimized:.16e}\n"));
        summary_pairs.push(format!("n={n}: {random_mean:.2e} -> {optimized:.2e}"));
    }
    write_output(&args.out, &csv)?;
    println!(
        "gap-sweep dim={} alpha={} [{}] -> {}",
        args.dim,
        args.alpha,
        summary_pairs.join(", "),
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct TaylorCheckSpec {
    command: &'static str,
    n: usize,
    dim: usize,
    seed: u64,
    alphas: Vec<f64>,
}

fn run_taylor_check(args: TaylorCheckArgs) -> Result<()> {
    if args.alphas.is_empty() {
        return Err(Error::Parameter("--alphas must not be empty".into()));
    }
    let spec = TaylorCheckSpec {
        command: "taylor-check",
        n: args.n,
        dim: args.dim,
        seed: args.seed,
        alphas: args.alphas.clone(),
    };
    let config = sample_uniform::<f64>(args.n, args.dim, args.seed)?;
    let mut csv = format!("# {}\nalpha,exact,taylor,abs_err\n", to_json_string(&spec));
    for &alpha in &args.alphas {
        let exact = shifted_loss(&config, alpha)?;
        let taylor = taylor_order2(&config, alpha)?;
        csv.push_str(&format!(
            "{alpha:.16e},{exact:.16e},{taylor:.16e},{:.16e}\n",
            (exact - taylor).abs()
        ));
    }
    write_output(&args.out, &csv)?;
    println!(
        "taylor-check n={} dim={} seed={} alphas={:?} -> {}",
        args.n,
        args.dim,
        args.seed,
        args.alphas,
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct VmfCheckSpec {
    command: &'static str,
    alpha: f64,
    kappas: Vec<f64>,
    nodes: usize,
}

fn run_vmf_check(args: VmfCheckArgs) -> Result<()> {
    if args.kappas.is_empty() {
        return Err(Error::Parameter("--kappas must not be empty".into()));
    }
    let spec = VmfCheckSpec {
        command: "vmf-check",
        alpha: args.alpha,
        kappas: args.kappas.clone(),
        nodes: args.nodes,
    };
    let pole = [0.0, 0.0, 1.0];
    let mut csv = format!("# {}\nkappa,energy\n", to_json_string(&spec));
    for &kappa in &args.kappas {
        let energy = vmf_energy(kappa, args.alpha, &pole, args.nodes)?;
        csv.push_str(&format!("{kappa:.16e},{energy:.16e}\n"));
    }
    write_output(&args.out, &csv)?;
    println!(
        "vmf-check alpha={} kappas={:?} nodes={} -> {}",
        args.alpha,
        args.kappas,
        args.nodes,
        args.out.display()
    );
    Ok(())
}

/// Splitmix-style combination of the master seed with experiment indices.
fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed
        ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display())))
}
