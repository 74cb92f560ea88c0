use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use clifft_cli::{
    emit_plot_data, load_multivector, load_root, run_suite, save_roots, Status, Suite, SuiteConfig,
};
use clifft_core::{
    cft_forward, cft_inverse, classify_algebra, convolve, generate, load_field, sample_root,
    save_field, split_field, verify_convolution_theorem, verify_root, AlgebraSignature, CftPlan,
    EvalMode, GridGeometry, GridMode, Multivector, MultivectorField, PhaseFunctions,
    RootOfMinusOne, SignalKind,
};

/// Exit status for a failed check or rejected input value.
const CHECK_FAILED: u8 = 1;
/// Exit status for usage and runtime errors.
const USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "clifft",
    version,
    about = "Clifford Fourier transforms of multivector fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify algebras and produce or certify square roots of -1.
    #[command(subcommand)]
    Roots(RootsCommand),
    /// Split a field into its ± parts with respect to two roots.
    Split(SplitArgs),
    /// Forward or inverse two-sided transform of a field file.
    Cft {
        #[arg(value_enum)]
        direction: CftDirection,
        #[command(flatten)]
        args: CftArgs,
    },
    /// Cyclic convolution of two fields, or a check of the convolution theorem.
    #[command(args_conflicts_with_subcommands = true)]
    Convolve {
        #[command(subcommand)]
        verify: Option<ConvolveCommand>,
        #[command(flatten)]
        args: Option<ConvolveArgs>,
    },
    /// Run the property suites.
    Check(CheckArgs),
    /// Export a slice of the n = 2 root manifold as CSV.
    PlotManifold(PlotArgs),
    /// Write a test signal as a field file.
    Generate(GenerateArgs),
}

#[derive(Subcommand)]
enum RootsCommand {
    /// Matrix-algebra class of Cl(p,q).
    Classify { p: usize, q: usize },
    /// Certify a multivector JSON file as a root of -1.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Draw roots by random conjugation of the canonical root.
    Sample {
        p: usize,
        q: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Root to conjugate instead of the canonical one.
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
    #[arg(long)]
    plus: PathBuf,
    #[arg(long)]
    minus: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CftDirection {
    Forward,
    Inverse,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fft,
    Direct,
}

impl From<ModeArg> for EvalMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Fft => EvalMode::Fft,
            ModeArg::Direct => EvalMode::Direct,
        }
    }
}

#[derive(Args)]
struct CftArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
    /// 1-based axes carried by the left phase; the rest go right.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    left_axes: Vec<usize>,
    /// Defaults to `fft` on cyclic grids and `direct` otherwise.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConvolveArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ConvolveCommand {
    /// Compare the transform of a convolution against its eight-term expansion.
    VerifyTheorem {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        left_axes: Vec<usize>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CheckArgs {
    /// Suites to run; all when omitted.
    #[arg(long = "suite", value_parser = parse_suite)]
    suites: Vec<Suite>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// JSON configuration; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reduced problem sizes.
    #[arg(long)]
    smoke: bool,
    /// Skip the wall-time comparison so the report is reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Override every check's tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct PlotArgs {
    p: usize,
    q: usize,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    max: f64,
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignalArg {
    Random,
    Delta,
    Constant,
    Gaussian,
}

#[derive(Args)]
struct GenerateArgs {
    p: usize,
    q: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    #[arg(long, value_enum, default_value = "random")]
    kind: SignalArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-axis `[-L, L]` quadrature domain; cyclic grid when omitted.
    #[arg(long)]
    half_width: Option<f64>,
    /// Grid index of a delta or centre of a gaussian (in coordinates).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    at: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Multivector JSON used as amplitude; the scalar 1 when omitted.
    #[arg(long)]
    amplitude: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(USAGE);
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}

/// `CLIFFT_THREADS` caps the worker pool.
fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("CLIFFT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .with_context(|| format!("CLIFFT_THREADS={value:?} is not a thread count"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

/// `Ok(false)` means the command ran but its check did not pass.
fn run(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Roots(cmd) => roots(cmd),
        Command::Split(args) => split(args),
        Command::Cft { direction, args } => cft(direction, args),
        Command::Convolve {
            verify: Some(cmd), ..
        } => verify_theorem(cmd),
        Command::Convolve {
            args: Some(args), ..
        } => {
            let a = load_field(&args.a).with_context(|| format!("reading {}", args.a.display()))?;
            let b = load_field(&args.b).with_context(|| format!("reading {}", args.b.display()))?;
            save_field(&convolve(&a, &b)?, &args.out)?;
            Ok(true)
        }
        Command::Convolve { .. } => bail!("convolve needs --a, --b and --out"),
        Command::Check(args) => check(args),
        Command::PlotManifold(args) => {
            let sig = AlgebraSignature::new(args.p, args.q)?;
            let rows = emit_plot_data(sig, (args.min, args.max), args.resolution, &args.out)?;
            eprintln!("{rows} rows written to {}", args.out.display());
            Ok(true)
        }
        Command::Generate(args) => generate_field(args),
    }
}

fn roots(cmd: RootsCommand) -> anyhow::Result<bool> {
    match cmd {
        RootsCommand::Classify { p, q } => {
            let sig = AlgebraSignature::new(p, q)?;
            let class = classify_algebra(sig);
            println!(
                "{}",
                serde_json::to_string(&ClassifyOutput::new(sig, class))?
            );
            Ok(true)
        }
        RootsCommand::Verify { file, tol } => {
            let value =
                load_multivector(&file).with_context(|| format!("reading {}", file.display()))?;
            match verify_root(&value, tol) {
                Ok(root) => {
                    println!("{}", serde_json::to_string(&root.to_record())?);
                    Ok(true)
                }
                Err(e) => {
                    eprintln!("{e}");
                    Ok(false)
                }
            }
        }
        RootsCommand::Sample {
            p,
            q,
            seed,
            count,
            base,
            out,
        } => {
            let sig = AlgebraSignature::new(p, q)?;
            let base = base.as_deref().map(read_root).transpose()?;
            let roots: Vec<RootOfMinusOne> = (0..count as u64)
                .map(|i| sample_root(sig, seed.wrapping_add(i), base.as_ref().map(|b| b.value())))
                .collect::<Result<_, _>>()?;
            save_roots(&roots, &out)?;
            Ok(true)
        }
    }
}

#[derive(serde::Serialize)]
struct ClassifyOutput {
    p: usize,
    q: usize,
    s8: u8,
    ring: String,
    matrix_size: f64,
    d: f64,
}

impl ClassifyOutput {
    fn new(sig: AlgebraSignature, class: clifft_core::RingClass) -> Self {
        Self {
            p: sig.p(),
            q: sig.q(),
            s8: class.s8,
            ring: class.ring.to_string(),
            matrix_size: class.matrix_size(),
            d: class.d,
        }
    }
}

fn read_field(path: &Path) -> anyhow::Result<MultivectorField> {
    load_field(path).with_context(|| format!("reading {}", path.display()))
}

fn read_root(path: &Path) -> anyhow::Result<RootOfMinusOne> {
    load_root(path).with_context(|| format!("reading root {}", path.display()))
}

fn split(args: SplitArgs) -> anyhow::Result<bool> {
    let h = read_field(&args.input)?;
    let (plus, minus) = split_field(&h, &read_root(&args.f)?, &read_root(&args.g)?)?;
    save_field(&plus, &args.plus)?;
    save_field(&minus, &args.minus)?;
    Ok(true)
}

fn plan_for(
    field: &MultivectorField,
    f: RootOfMinusOne,
    g: RootOfMinusOne,
    left_axes: &[usize],
    mode: Option<ModeArg>,
    inverse: bool,
) -> anyhow::Result<CftPlan> {
    let n = field.signature().dim();
    let phase = PhaseFunctions::new(n, left_axes)?;
    let grid = field.grid();
    let mode = mode.map_or(
        if grid.is_cyclic() {
            EvalMode::Fft
        } else {
            EvalMode::Direct
        },
        EvalMode::from,
    );
    if grid.is_cyclic() || !inverse {
        return Ok(CftPlan::new(f, g, phase, grid.clone(), mode)?);
    }
    // spectrum on a quadrature grid: rebuild the dual spatial grid
    let domain = (0..n)
        .map(|l| {
            let count = grid.dims()[l] as f64;
            let dx = 2.0 * PI / (count * grid.spacing(l));
            let half = (grid.dims()[l] / 2) as f64 * dx;
            (-half, -half + count * dx)
        })
        .collect();
    let spatial = GridGeometry::quadrature(grid.dims().to_vec(), domain)?;
    Ok(CftPlan::new(f, g, phase, spatial, mode)?.with_frequency_grid(grid.clone())?)
}

fn cft(direction: CftDirection, args: CftArgs) -> anyhow::Result<bool> {
    let h = read_field(&args.input)?;
    let (f, g) = (read_root(&args.f)?, read_root(&args.g)?);
    let inverse = matches!(direction, CftDirection::Inverse);
    let plan = plan_for(&h, f, g, &args.left_axes, args.mode, inverse)?;
    let out = if inverse {
        cft_inverse(&h, &plan)?
    } else {
        cft_forward(&h, &plan)?
    };
    save_field(&out, &args.out)?;
    Ok(true)
}

fn verify_theorem(cmd: ConvolveCommand) -> anyhow::Result<bool> {
    let ConvolveCommand::VerifyTheorem {
        a,
        b,
        f,
        g,
        left_axes,
        tol,
        report,
    } = cmd;
    let (a, b) = (read_field(&a)?, read_field(&b)?);
    let plan = plan_for(&a, read_root(&f)?, read_root(&g)?, &left_axes, None, false)?;
    let summary = verify_convolution_theorem(&a, &b, &plan)?.report();
    let text = serde_json::to_string_pretty(&summary)?;
    match report {
        Some(path) => fs::write(&path, text + "\n")?,
        None => println!("{text}"),
    }
    let ok = summary.relative_error <= tol;
    eprintln!(
        "convolution theorem: relative error {:.3e} (tolerance {tol:.1e}) {}",
        summary.relative_error,
        if ok { "PASS" } else { "FAIL" }
    );
    Ok(ok)
}

fn check(args: CheckArgs) -> anyhow::Result<bool> {
    let mut config = match (&args.config, args.smoke) {
        (Some(path), _) => serde_json::from_str(
            &fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        )
        .with_context(|| format!("parsing {}", path.display()))?,
        (None, true) => SuiteConfig::smoke(),
        (None, false) => SuiteConfig::default(),
    };
    if !args.suites.is_empty() {
        config.suites = args.suites.iter().copied().collect();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.no_timing {
        config.timing = false;
    }
    if args.tolerance.is_some() {
        config.tolerance = args.tolerance;
    }
    let report = run_suite(&config)?;
    print!("{}", report.table());
    if let Some(path) = &args.report {
        fs::write(path, report.to_json() + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    for failed in report.failures() {
        eprintln!("FAIL {}", failed.name);
    }
    Ok(report.count(Status::Fail) == 0)
}

fn generate_field(args: GenerateArgs) -> anyhow::Result<bool> {
    let sig = AlgebraSignature::new(args.p, args.q)?;
    let mode = match args.half_width {
        Some(l) => GridMode::Quadrature {
            domain: vec![(-l, l); args.dims.len()],
        },
        None => GridMode::Cyclic,
    };
    let grid = GridGeometry::new(args.dims.clone(), mode)?;
    let amplitude = match &args.amplitude {
        Some(path) => load_multivector(path)?,
        None => Multivector::one(sig),
    };
    let kind = match args.kind {
        SignalArg::Random => SignalKind::Random { seed: args.seed },
        SignalArg::Constant => SignalKind::Constant { amplitude },
        SignalArg::Delta => {
            let index = if args.at.is_empty() {
                vec![0; args.dims.len()]
            } else {
                args.at
                    .iter()
                    .map(|&x| {
                        if x >= 0.0 && x.fract() == 0.0 {
                            Ok(x as usize)
                        } else {
                            Err(anyhow::anyhow!("delta index {x} is not a grid index"))
                        }
                    })
                    .collect::<anyhow::Result<_>>()?
            };
            SignalKind::Delta { index, amplitude }
        }
        SignalArg::Gaussian => SignalKind::Gaussian {
            amplitude,
            sigma: vec![args.sigma; args.dims.len()],
            center: if args.at.is_empty() {
                vec![0.0; args.dims.len()]
            } else {
                args.at.clone()
            },
        },
    };
    save_field(&generate(&kind, sig, &grid)?, &args.out)?;
    Ok(true)
}
