use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qudit_nlm::closed_form::{nlm_schmidt, Method, CLOSED_FORM_DIMENSIONS};
use qudit_nlm::invariants::SpectrumInvariants;
use qudit_nlm::lu_opt::{minimize, objective, GradientMode, LocalUnitaryParams};
use qudit_nlm::qudit_core::{schmidt_decompose, scramble, SpectrumFile, StateFile};
use qudit_nlm::scan::{self, ScanConfig};
use qudit_nlm::{Config, NlmError, State};

/// Deviation of `Σλ²` from 1 beyond which inputs are rescaled with a warning.
const NORM_WARN_TOLERANCE: f64 = 1e-6;
const GRID_SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "nlm", version, about = "Non-local magic of bipartite pure qudit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum invariants as JSON.
    Invariants(SpectrumInput),
    /// Schmidt-attained NLM from the closed form (N = 2..5).
    NlmFormula(SpectrumInput),
    /// Schmidt-attained NLM from the quadruple sum (any N).
    NlmOracle(SpectrumInput),
    /// Multi-start minimisation over local unitaries.
    NlmOptimize(OptimizeArgs),
    /// Formula-versus-optimiser scan written as CSV.
    Scan(ScanArgs),
    /// N = 3 simplex grid.
    Grid3(GridArgs),
    /// N = 5 slice (p0, p1, p2, 0, 0) grid.
    #[command(name = "grid5-slice")]
    Grid5Slice(GridArgs),
    /// Band projections of an N = 4 scan.
    Slice4(Slice4Args),
    /// Residual statistics of a scan.
    Stats(StatsArgs),
}

#[derive(Args)]
struct SpectrumInput {
    /// JSON spectrum file `{"dim": N, "lambdas": [...]}`.
    #[arg(value_name = "FILE", conflicts_with = "lambda", required_unless_present = "lambda")]
    file: Option<PathBuf>,
    /// Schmidt coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GradArg {
    Fd,
    Analytic,
}

impl From<GradArg> for GradientMode {
    fn from(g: GradArg) -> Self {
        match g {
            GradArg::Fd => GradientMode::FiniteDifference,
            GradArg::Analytic => GradientMode::Analytic,
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    /// JSON state file `{"dim": N, "amplitudes": [[[re, im], ...], ...]}`.
    #[arg(long, conflicts_with = "lambda", required_unless_present = "lambda")]
    state: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
    #[arg(long, default_value_t = 50)]
    starts: usize,
    #[arg(long, default_value_t = 300)]
    maxiter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    init_scale: f64,
    #[arg(long, value_enum, default_value_t = GradArg::Analytic)]
    grad: GradArg,
    #[arg(long, default_value_t = 1e-9)]
    grad_tol: f64,
    /// Apply random local unitaries drawn from this seed first.
    #[arg(long)]
    scramble_seed: Option<u64>,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    dim: usize,
    /// Defaults to the desk-scale count for `dim`.
    #[arg(long)]
    samples: Option<usize>,
    /// Defaults to the desk-scale count for `dim`.
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long, default_value_t = 300)]
    maxiter: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    init_scale: f64,
    #[arg(long, value_enum, default_value_t = GradArg::Analytic)]
    grad: GradArg,
    /// 10⁴ samples with the full per-dimension start counts; hours of CPU.
    #[arg(long)]
    full_scale: bool,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    resolution: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Slice4Args {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = scan::DEFAULT_BAND_CENTERS)]
    centers: Vec<f64>,
    #[arg(long, default_value_t = scan::DEFAULT_BAND_HALFWIDTH)]
    halfwidth: f64,
    /// Files are written as `<prefix>_<center>.csv`.
    #[arg(long)]
    out_prefix: String,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = scan::DEFAULT_THRESHOLD)]
    threshold: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let violation = matches!(e.downcast_ref::<NlmError>(), Some(NlmError::InvariantViolation(_)));
            ExitCode::from(if violation { 3 } else { 1 })
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Invariants(input) => {
            let lambdas = read_lambdas(&input)?;
            print_json(&SpectrumInvariants::compute(&lambdas))
        }
        Command::NlmFormula(input) => print_json(&nlm_schmidt(&read_lambdas(&input)?, Method::ClosedForm)?),
        Command::NlmOracle(input) => print_json(&nlm_schmidt(&read_lambdas(&input)?, Method::Oracle)?),
        Command::NlmOptimize(args) => optimize(args),
        Command::Scan(args) => run_scan(args),
        Command::Grid3(args) => grid(args, 3),
        Command::Grid5Slice(args) => grid(args, 5),
        Command::Slice4(args) => slice4(args),
        Command::Stats(args) => {
            let records = scan::read_scan_csv(File::open(&args.input).with_context(|| open_msg(&args.input))?)?;
            scan::verify_records(&records, 0)?;
            print_json(&scan::residual_stats(&records, args.threshold)?)
        }
    }
}

fn open_msg(p: &Path) -> String {
    format!("cannot open {}", p.display())
}

fn print_json<S: serde::Serialize>(value: &S) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Writer for `path`, or standard output.
fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn normalise(mut lambdas: Vec<f64>) -> anyhow::Result<Vec<f64>> {
    if let Some((i, v)) = lambdas.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
        bail!("coefficient {i} is {v}; coefficients must be finite and non-negative");
    }
    let norm_sq: f64 = lambdas.iter().map(|l| l * l).sum();
    if norm_sq <= 0.0 {
        bail!("all coefficients are zero");
    }
    if (norm_sq - 1.0).abs() > NORM_WARN_TOLERANCE {
        log::warn!("sum of squared coefficients is {norm_sq}; rescaling to 1");
        let s = norm_sq.sqrt();
        lambdas.iter_mut().for_each(|l| *l /= s);
    }
    Ok(lambdas)
}

fn read_lambdas(input: &SpectrumInput) -> anyhow::Result<Vec<f64>> {
    let raw = match (&input.lambda, &input.file) {
        (Some(l), _) => l.clone(),
        (None, Some(path)) => SpectrumFile::read(path)
            .with_context(|| format!("reading {}", path.display()))?
            .ordered_lambdas()?
            .to_vec(),
        (None, None) => bail!("give a spectrum file or --lambda"),
    };
    normalise(raw)
}

fn optimize(args: OptimizeArgs) -> anyhow::Result<()> {
    let (state, lambdas) = match (&args.lambda, &args.state) {
        (Some(l), _) => {
            let l = normalise(l.clone())?;
            (State::aligned(&l)?, l)
        }
        (None, Some(path)) => {
            let st = StateFile::read(path)
                .with_context(|| format!("reading {}", path.display()))?
                .to_state()?;
            let l = schmidt_decompose(&st)?.spectrum.into_inner();
            (st, l)
        }
        (None, None) => bail!("give --state or --lambda"),
    };
    let state = match args.scramble_seed {
        Some(seed) => scramble(&state, seed),
        None => state,
    };
    let config = Config {
        n_starts: args.starts,
        max_iter: args.maxiter,
        grad_tolerance: args.grad_tol,
        seed: args.seed,
        init_scale: args.init_scale,
        gradient_mode: args.grad.into(),
        ..Default::default()
    };
    let result = minimize(&state, &config)?;

    let lowest = result.per_start_values.iter().copied().fold(f64::INFINITY, f64::min);
    if (result.min_value - lowest).abs() > 1e-12 {
        return Err(NlmError::InvariantViolation("minValue differs from the lowest start".into()).into());
    }
    let at_origin = objective(&state, &LocalUnitaryParams::zeros(state.dim()))?;
    if result.min_value > at_origin + 1e-9 {
        return Err(NlmError::InvariantViolation(format!(
            "minValue {} exceeds the untransformed value {at_origin}",
            result.min_value
        ))
        .into());
    }

    let method = if CLOSED_FORM_DIMENSIONS.contains(&lambdas.len()) {
        Method::ClosedForm
    } else {
        Method::Oracle
    };
    let schmidt = nlm_schmidt(&lambdas, method)?;
    print_json(&json!({
        "result": result,
        "lambdas": lambdas,
        "nlmSchmidt": schmidt.value,
        "residual": schmidt.value - result.min_value,
    }))
}

fn run_scan(args: ScanArgs) -> anyhow::Result<()> {
    let Some((desk_samples, desk_starts)) = scan::desk_scale(args.dim) else {
        return Err(NlmError::UnsupportedDimension(args.dim).into());
    };
    let (default_samples, default_starts) = if args.full_scale {
        (scan::FULL_SCALE_SAMPLES, scan::full_scale_starts(args.dim).unwrap_or(desk_starts))
    } else {
        (desk_samples, desk_starts)
    };
    let config = ScanConfig {
        dim: args.dim,
        samples: args.samples.unwrap_or(default_samples),
        optimizer: Config {
            n_starts: args.starts.unwrap_or(default_starts),
            max_iter: args.maxiter,
            seed: args.seed,
            init_scale: args.init_scale,
            gradient_mode: args.grad.into(),
            ..Default::default()
        },
    };
    let records = scan::run_scan(&config)?;
    scan::verify_records(&records, 100)?;
    let mut out = output(args.out.as_deref())?;
    scan::write_scan_csv(&records, &mut out)?;
    out.flush()?;
    drop(out);
    if args.out.is_some() {
        print_json(&scan::residual_stats(&records, scan::DEFAULT_THRESHOLD)?)?;
    }
    Ok(())
}

fn grid(args: GridArgs, dim: usize) -> anyhow::Result<()> {
    let points = if dim == 3 {
        scan::simplex_grid_qutrit(args.resolution)?
    } else {
        scan::ququint_slice_grid(args.resolution)?
    };
    let defect = scan::grid_symmetry_defect(&points, args.resolution)?;
    if defect > GRID_SYMMETRY_TOLERANCE {
        return Err(NlmError::InvariantViolation(format!("grid asymmetric by {defect:e}")).into());
    }
    let mut out = output(args.out.as_deref())?;
    scan::write_grid_csv(&points, &mut out)?;
    out.flush()?;
    Ok(())
}

fn slice4(args: Slice4Args) -> anyhow::Result<()> {
    let file = File::open(&args.input).with_context(|| open_msg(&args.input))?;
    let records = scan::read_scan_csv(BufReader::new(file))?;
    let slices = scan::n4_band_slices(&records, &args.centers, args.halfwidth)?;
    let mut summary = Vec::new();
    for slice in &slices {
        if let Some(p) = slice.points.iter().find(|p| (p.probs.iter().sum::<f64>() - 1.0).abs() > 1e-12) {
            return Err(NlmError::InvariantViolation(format!("projected point {:?} not normalised", p.probs)).into());
        }
        let path = PathBuf::from(format!("{}_{}.csv", args.out_prefix, slice.center));
        let mut out = output(Some(&path))?;
        scan::write_band_csv(slice, &mut out)?;
        out.flush()?;
        summary.push(json!({ "center": slice.center, "points": slice.points.len(), "file": path }));
    }
    print_json(&summary)
}
