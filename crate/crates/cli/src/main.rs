//! `cyclic-ssp` command-line interface.
//!
//! Exit codes: 0 success, 1 I/O failure or failed verification, 2 invalid
//! flags or parameters.

mod csv;

use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclic_ssp::encoder::Encoder;
use cyclic_ssp::kernels::{periodic_gaussian_theta, KernelSpec};
use cyclic_ssp::sampling::sample_phase_matrix;
use cyclic_ssp::verification::{
    empirical_profile, profile_report, run_checks, uniform_grid, CheckOptions, ProfileConfig,
    DEFAULT_GRID_POINTS, FIGURE1_BAND, FIGURE1_EMBED_DIM, FIGURE1_REPLICATES, FIGURE1_SIGMA,
};
use cyclic_ssp::{PeriodicDomain, PhaseMatrix, SamplerSpec};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "cyclic-ssp",
    version,
    about = "Periodic SSP embeddings and their kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a phase matrix and write it as JSON.
    Sample(SampleArgs),
    /// Encode points with a phase matrix; one CSV row per point.
    Encode(EncodeArgs),
    /// Evaluate an analytic kernel on a grid.
    Kernel(KernelArgs),
    /// Monte-Carlo Dirichlet and periodic Gaussian profiles (d=100, N=500, B=5, σ=1, t₀=2π).
    Figure1(Figure1Args),
    /// Run the invariant checks.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerKind {
    Uniform,
    Normal,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    Dirichlet,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelForm {
    /// Finite-band cosine sum.
    Sum,
    /// Infinite-band theta ratio (Gaussian only).
    Theta,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Period t₀; a real number or `two-pi`.
    #[arg(long, value_parser = parse_period, default_value = "two-pi")]
    period: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    sampler: SamplerKind,
    #[arg(long, default_value_t = FIGURE1_BAND)]
    band: u32,
    /// Shape parameter for `--sampler normal`.
    #[arg(long, default_value_t = FIGURE1_SIGMA)]
    sigma: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    /// Phase-matrix JSON written by `sample`.
    #[arg(long)]
    matrix: PathBuf,
    /// A point as comma-separated coordinates; repeatable.
    #[arg(long = "x", allow_hyphen_values = true)]
    points: Vec<String>,
    /// File with one comma-separated point per line.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum)]
    kernel: KernelKind,
    #[arg(long, value_enum, default_value = "sum")]
    form: KernelForm,
    #[arg(long, default_value_t = FIGURE1_BAND)]
    band: u32,
    #[arg(long, default_value_t = FIGURE1_SIGMA)]
    sigma: f64,
    #[arg(long, value_parser = parse_period, default_value = "two-pi")]
    period: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GridArgs {
    /// Grid start; defaults to -t₀/2.
    #[arg(long, allow_hyphen_values = true)]
    grid_min: Option<f64>,
    /// Grid end; defaults to t₀/2.
    #[arg(long, allow_hyphen_values = true)]
    grid_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    points: usize,
}

impl GridArgs {
    fn build(&self, period: f64) -> cyclic_ssp::Result<Vec<f64>> {
        uniform_grid(
            self.grid_min.unwrap_or(-period / 2.0),
            self.grid_max.unwrap_or(period / 2.0),
            self.points,
        )
    }
}

#[derive(Args)]
struct Figure1Args {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = FIGURE1_REPLICATES)]
    replicates: usize,
    #[arg(long, default_value_t = FIGURE1_EMBED_DIM)]
    dim: usize,
    #[arg(long, default_value_t = FIGURE1_BAND)]
    band: u32,
    #[arg(long, default_value_t = FIGURE1_SIGMA)]
    sigma: f64,
    #[arg(long, value_parser = parse_period, default_value = "two-pi")]
    period: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Negative control: add a matrix with a broken conjugate pair.
    #[arg(long, hide = true)]
    inject_corrupt_matrix: bool,
}

fn parse_period(s: &str) -> Result<f64, String> {
    let value = match s {
        "two-pi" => TAU,
        "pi" => PI,
        _ => s
            .parse::<f64>()
            .map_err(|e| format!("{s:?} is not a real number: {e}"))?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(format!("period must be finite and > 0, got {s}"))
    }
}

/// Failure with its exit code.
enum Failure {
    Usage(String),
    Io(String),
    Verify,
}

impl From<cyclic_ssp::Error> for Failure {
    fn from(e: cyclic_ssp::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn sampler_from(kind: SamplerKind, band: u32, sigma: f64) -> cyclic_ssp::Result<SamplerSpec> {
    match kind {
        SamplerKind::Uniform => SamplerSpec::uniform(band),
        SamplerKind::Normal => SamplerSpec::discrete_normal(band, sigma),
    }
}

fn cmd_sample(args: SampleArgs) -> Result<(), Failure> {
    let domain = PeriodicDomain::new(args.n, args.period)?;
    let sampler = sampler_from(args.sampler, args.band, args.sigma)?;
    let pm = sample_phase_matrix(args.dim, domain, sampler, args.seed)?;
    write_file(&args.out, &pm.to_json()?)
}

fn parse_point(line: &str) -> Result<Vec<f64>, Failure> {
    line.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Failure::Usage(format!("bad coordinate {t:?} in {line:?}: {e}")))
        })
        .collect()
}

fn cmd_encode(args: EncodeArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.matrix).map_err(|e| io_error(&args.matrix, e))?;
    let pm = PhaseMatrix::from_json(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.matrix.display())))?;
    let mut points = args
        .points
        .iter()
        .map(|p| parse_point(p))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(input) = &args.input {
        let text = fs::read_to_string(input).map_err(|e| io_error(input, e))?;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            points.push(parse_point(line)?);
        }
    }
    if points.is_empty() {
        return Err(Failure::Usage("no points given; use --x or --input".into()));
    }
    let encoder = Encoder::new(&pm);
    let mut out = String::new();
    for x in &points {
        csv::push_row(&mut out, encoder.encode(x)?.values().iter().copied());
    }
    match &args.out {
        Some(path) => write_file(path, &out),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn cmd_kernel(args: KernelArgs) -> Result<(), Failure> {
    let grid = args.grid.build(args.period)?;
    let values: Vec<f64> = match (args.kernel, args.form) {
        (KernelKind::Dirichlet, KernelForm::Theta) => {
            return Err(Failure::Usage(
                "--form theta applies to --kernel gaussian only".into(),
            ));
        }
        (KernelKind::Gaussian, KernelForm::Theta) => grid
            .iter()
            .map(|&x| periodic_gaussian_theta(x, args.sigma, args.period))
            .collect::<Result<_, _>>()?,
        (kind, KernelForm::Sum) => {
            let spec = match kind {
                KernelKind::Dirichlet => KernelSpec::dirichlet(args.band, args.period)?,
                KernelKind::Gaussian => {
                    KernelSpec::periodic_gaussian(args.band, args.sigma, args.period)?
                }
            };
            grid.iter()
                .map(|&x| spec.eval(x))
                .collect::<Result<_, _>>()?
        }
    };
    let mut out = String::from("displacement,analytic\n");
    for (x, k) in grid.iter().zip(&values) {
        csv::push_row(&mut out, [*x, *k]);
    }
    write_file(&args.out, &out)
}

fn cmd_figure1(args: Figure1Args) -> Result<(), Failure> {
    let domain = PeriodicDomain::new(1, args.period)?;
    let grid = uniform_grid(-args.period / 2.0, args.period / 2.0, DEFAULT_GRID_POINTS)?;
    let profile_for = |sampler| {
        empirical_profile(&ProfileConfig {
            embed_dim: args.dim,
            replicates: args.replicates,
            sampler,
            domain,
            grid: grid.clone(),
            master_seed: args.seed,
        })
    };
    let dirichlet = profile_for(SamplerSpec::uniform(args.band)?)?;
    let gaussian = profile_for(SamplerSpec::discrete_normal(args.band, args.sigma)?)?;

    let mut out = String::from(
        "displacement,dirichlet_analytic,dirichlet_empirical_mean,dirichlet_empirical_std,\
         gaussian_analytic,gaussian_empirical_mean,gaussian_empirical_std\n",
    );
    for i in 0..grid.len() {
        csv::push_row(
            &mut out,
            [
                grid[i],
                dirichlet.analytic()[i],
                dirichlet.empirical_mean()[i],
                dirichlet.empirical_std()[i],
                gaussian.analytic()[i],
                gaussian.empirical_mean()[i],
                gaussian.empirical_std()[i],
            ],
        );
    }
    write_file(&args.out, &out)?;
    let d = profile_report(&dirichlet);
    let g = profile_report(&gaussian);
    println!(
        "dirichlet_max_abs_deviation={}",
        csv::format_value(d.max_abs_deviation)
    );
    println!(
        "gaussian_max_abs_deviation={}",
        csv::format_value(g.max_abs_deviation)
    );
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let outcomes = run_checks(CheckOptions {
        seed: args.seed,
        inject_corrupt_matrix: args.inject_corrupt_matrix,
    });
    let mut ok = true;
    for o in &outcomes {
        println!(
            "{} {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail
        );
        ok &= o.passed;
    }
    if ok {
        Ok(())
    } else {
        let failed: Vec<&str> = outcomes
            .iter()
            .filter(|o| !o.passed)
            .map(|o| o.name)
            .collect();
        eprintln!("error: failed checks: {}", failed.join(", "));
        Err(Failure::Verify)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Kernel(a) => cmd_kernel(a),
        Command::Figure1(a) => cmd_figure1(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verify) => ExitCode::from(1),
    }
}
