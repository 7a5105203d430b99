//! Command-line front end. The `focusmr` binary only calls [`main`].

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use crate::benchmarks::{self, BenchmarkMethod, BenchmarkReport};
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::focusing::{self, FocusConfig, FocusedEstimator, ScreeningThreshold};
use crate::io::{self, ColumnMap, HarmonizeMode, ReportFormat, TestDocument, TestResult};
use crate::model::{self, DEFAULT_ZERO_TOL};
use crate::simulation::{self, Method, ScenarioConfig, SeedProfile};
use crate::stats;
use crate::truncnorm::TruncSpec;

pub const THREADS_ENV: &str = "FOCUSMR_THREADS";

#[derive(Debug, Parser)]
#[command(name = "focusmr", version, about = "Bi-directional Mendelian randomization with focused instrument sets")]
pub struct Cli {
    /// Master seed for every random draw. Drawn from entropy and printed when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "json")]
    pub format: ReportFormat,
    /// Column names, e.g. `id=rsid,beta=b,se=stderr`.
    #[arg(long = "col-map", global = true)]
    pub col_map: Option<ColumnMap>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test for causal effects between two traits from GWAS summary files.
    Test(TestArgs),
    /// Monte-Carlo rejection rates on GWAS-seeded scenarios.
    Simulate(SimulateArgs),
    /// Identification diagnostics for a known ground truth.
    Diagnose(DiagnoseArgs),
    /// Mean and variance of a unit-variance truncated normal.
    Truncnorm(TruncnormArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionChoice {
    Dy,
    Yd,
    Both,
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorChoice {
    Focused(FocusedEstimator),
    Benchmark(BenchmarkMethod),
}

impl std::str::FromStr for EstimatorChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ivw" | "focused-ivw" => Ok(Self::Focused(FocusedEstimator::FocusedIvw)),
            "median" | "focused-median" => Ok(Self::Focused(FocusedEstimator::FocusedMedian)),
            other => other.parse().map(Self::Benchmark),
        }
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Summary statistics for trait D.
    #[arg(long)]
    pub exposure: PathBuf,
    /// Summary statistics for trait Y.
    #[arg(long)]
    pub outcome: PathBuf,
    #[arg(long, default_value_t = focusing::DEFAULT_TAU_F)]
    pub tau_f: f64,
    /// `auto` uses the `1 - 1/p` normal quantile.
    #[arg(long, default_value = "auto")]
    pub tau_s: ScreeningThreshold,
    #[arg(long, default_value_t = focusing::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// ivw, median, overall-ivw, mr-median or mr-egger.
    #[arg(long, default_value = "ivw")]
    pub estimator: EstimatorChoice,
    #[arg(long, value_enum, default_value = "joint")]
    pub direction: DirectionChoice,
    /// id joins on variant id; allele also aligns effect alleles.
    #[arg(long, default_value = "id")]
    pub harmonize: HarmonizeMode,
    /// Bootstrap resamples for median-based inference.
    #[arg(long, default_value_t = focusing::DEFAULT_BOOTSTRAP_REPS)]
    pub bootstrap: usize,
    /// Write per-SNP focused-set membership as TSV.
    #[arg(long)]
    pub membership: Option<PathBuf>,
    /// Write focused-set ratios and normalized IVW weights as TSV.
    #[arg(long)]
    pub emit_density: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Seed effects TSV with columns alpha_d, se_d, alpha_y, se_y.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub seed_file: Option<PathBuf>,
    /// Generate a synthetic seed with this many SNPs.
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Enforce screening separation on the synthetic seed with this constant.
    #[arg(long, requires = "synthetic")]
    pub min_snr_c1: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_dy: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta_yd: f64,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    /// Comma-separated; focused methods without `:tau` run once per `--tau-f` value.
    #[arg(long, value_delimiter = ',', default_value = "focused-ivw")]
    pub methods: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1.5")]
    pub tau_f: Vec<f64>,
    #[arg(long, default_value = "auto")]
    pub tau_s: ScreeningThreshold,
    #[arg(long, default_value_t = focusing::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = 500)]
    pub bootstrap: usize,
    /// `(beta_dy, beta_yd)` pairs as `0,0;0.3,0`; emits a TSV table.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// TruthConfig as JSON, or TSV with columns pi_d, pi_y, se_d, se_y.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_dy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_yd: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ZERO_TOL)]
    pub zero_tol: f64,
}

#[derive(Debug, Args)]
pub struct TruncnormArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub mu: f64,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema: &'static str,
    schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(schema: &'static str, seed: Option<u64>, body: T) -> Envelope<T> {
    Envelope {
        schema,
        schema_version: io::SCHEMA_VERSION,
        seed,
        body,
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s: u64 = rand::rng().random();
        eprintln!("focusmr: no --seed given, using {s}");
        s
    })
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("focusmr: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 3 for numerical degeneracy, 2 for everything else.
pub fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let out = cli.out.as_deref();
    let text = match &cli.command {
        Command::Test(args) => run_test(cli, args)?,
        Command::Simulate(args) => run_simulate(cli, args)?,
        Command::Diagnose(args) => {
            let betas = args.beta_dy.zip(args.beta_yd);
            let mut truth = io::load_truth(&args.truth, betas)?;
            if let Some(b) = args.beta_dy {
                truth.beta_dy = b;
            }
            if let Some(b) = args.beta_yd {
                truth.beta_yd = b;
            }
            let truth = model::TruthConfig::new(
                truth.pi_d,
                truth.pi_y,
                truth.beta_dy,
                truth.beta_yd,
                truth.se_d,
                truth.se_y,
            )?;
            let report = model::diagnose_identification(&truth, args.zero_tol)?;
            io::to_json(&envelope("focusmr/diagnose", None, report))?
        }
        Command::Truncnorm(args) => {
            #[derive(Serialize)]
            struct Moments {
                a: f64,
                b: f64,
                mu: f64,
                mass: f64,
                mean: f64,
                variance: f64,
            }
            let spec = TruncSpec::new(args.a, args.b, args.mu)?;
            let body = Moments {
                a: args.a,
                b: args.b,
                mu: args.mu,
                mass: spec.mass(),
                mean: spec.mean()?,
                variance: spec.variance()?,
            };
            io::to_json(&envelope("focusmr/truncnorm", None, body))?
        }
    };
    io::emit(&text, out)
}

fn benchmark_joint(
    method: BenchmarkMethod,
    panel: &crate::panel::Panel,
    cfg: &FocusConfig,
) -> Result<TestResult> {
    let half = FocusConfig {
        alpha: cfg.alpha / 2.0,
        ..cfg.clone()
    };
    let dy: BenchmarkReport = benchmarks::run_benchmark(method, panel, Direction::DtoY, &half)?;
    let yd = benchmarks::run_benchmark(method, panel, Direction::YtoD, &half)?;
    Ok(TestResult::BenchmarkJoint {
        alpha: cfg.alpha,
        p_value: (2.0 * dy.p_value.min(yd.p_value)).min(1.0),
        reject: dy.reject || yd.reject,
        dy,
        yd,
    })
}

fn run_test(cli: &Cli, args: &TestArgs) -> Result<String> {
    let columns = cli.col_map.clone().unwrap_or_default();
    let exposure = io::load_gwas(&args.exposure, &columns)?;
    let outcome = io::load_gwas(&args.outcome, &columns)?;
    let (panel, summary) = io::harmonize(&exposure, &outcome, args.harmonize)?;
    if summary.kept < summary.matched {
        eprintln!(
            "focusmr: harmonization kept {} of {} shared variants ({} palindromic, {} allele mismatch, {} missing alleles)",
            summary.kept,
            summary.matched,
            summary.dropped_palindromic,
            summary.dropped_mismatch,
            summary.dropped_missing_alleles
        );
    }
    let seed = resolve_seed(cli.seed);
    let cfg = FocusConfig {
        tau_f: args.tau_f,
        tau_s: args.tau_s,
        alpha: args.alpha,
        bootstrap_reps: args.bootstrap,
        seed,
    };
    cfg.validate()?;

    let directions: &[Direction] = match args.direction {
        DirectionChoice::Dy => &[Direction::DtoY],
        DirectionChoice::Yd => &[Direction::YtoD],
        DirectionChoice::Both | DirectionChoice::Joint => &Direction::BOTH,
    };
    let results = match (args.direction, args.estimator) {
        (DirectionChoice::Joint, EstimatorChoice::Focused(e)) => {
            vec![TestResult::Joint(focusing::test_joint_null(&panel, &cfg, e)?)]
        }
        (DirectionChoice::Joint, EstimatorChoice::Benchmark(m)) => {
            vec![benchmark_joint(m, &panel, &cfg)?]
        }
        (_, EstimatorChoice::Focused(e)) => directions
            .iter()
            .map(|&d| focusing::test_direction(&panel, d, &cfg, e).map(TestResult::Focused))
            .collect::<Result<_>>()?,
        (_, EstimatorChoice::Benchmark(m)) => directions
            .iter()
            .map(|&d| benchmarks::run_benchmark(m, &panel, d, &cfg).map(TestResult::Benchmark))
            .collect::<Result<_>>()?,
    };

    let tau_s = cfg.tau_s.resolve(panel.len())?;
    if let Some(path) = &args.membership {
        let tables: Vec<_> = directions
            .iter()
            .map(|&d| (d, focusing::membership(&panel, d, cfg.tau_f, tau_s)))
            .collect();
        io::emit(&io::membership_tsv(&tables), Some(path))?;
    }
    if let Some(path) = &args.emit_density {
        let tables: Vec<_> = directions
            .iter()
            .map(|&d| {
                let set = focusing::focused_set(&panel, d, cfg.tau_f, tau_s);
                (d, focusing::weighted_ratios(&panel, &set, d))
            })
            .collect();
        io::emit(&io::density_tsv(&tables), Some(path))?;
    }

    let doc = TestDocument {
        schema: "focusmr/test",
        schema_version: io::SCHEMA_VERSION,
        seed,
        panel_size: panel.len(),
        harmonization: summary,
        results,
    };
    io::render_test_document(&doc, cli.format)
}

/// `0,0;0.3,0` into pairs.
pub fn parse_grid(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let bad = || Error::InvalidArgument(format!("grid entry `{pair}` is not `beta_dy,beta_yd`"));
            let (a, b) = pair.split_once(',').ok_or_else(bad)?;
            Ok((
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

/// Expands focused methods given without `:tau` across every `tau_f`.
pub fn expand_methods(names: &[String], taus: &[f64]) -> Result<Vec<Method>> {
    let mut methods = Vec::new();
    for name in names.iter().map(|n| n.trim()).filter(|n| !n.is_empty()) {
        let parsed: Method = name.parse().map_err(Error::InvalidArgument)?;
        match parsed {
            Method::Focused { estimator, .. } if !name.contains(':') => {
                methods.extend(taus.iter().map(|&tau_f| Method::Focused { estimator, tau_f }));
            }
            m => methods.push(m),
        }
    }
    Ok(methods)
}

fn run_simulate(cli: &Cli, args: &SimulateArgs) -> Result<String> {
    let seed = resolve_seed(cli.seed);
    let effects = match (&args.seed_file, args.synthetic) {
        (Some(path), _) => io::load_seed(path)?,
        (None, Some(p)) => {
            let profile = match args.min_snr_c1 {
                Some(c1) => {
                    let tau_max = args.tau_f.iter().copied().fold(0.0, f64::max);
                    SeedProfile::separated(p, tau_max, c1)
                }
                None => SeedProfile::default(),
            };
            // The last stream is reserved for the seed; replications use 0..reps.
            let mut rng = stats::rng_stream(seed, u64::MAX);
            simulation::synthetic_seed(p, &mut rng, &profile)?
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "one of --seed-file or --synthetic is required".into(),
            ))
        }
    };
    let scenario = ScenarioConfig {
        kappa: args.kappa,
        beta_dy: args.beta_dy,
        beta_yd: args.beta_yd,
        n_reps: args.reps,
        cfg: FocusConfig {
            tau_f: args.tau_f.first().copied().unwrap_or(focusing::DEFAULT_TAU_F),
            tau_s: args.tau_s,
            alpha: args.alpha,
            bootstrap_reps: args.bootstrap,
            seed,
        },
        methods: expand_methods(&args.methods, &args.tau_f)?,
        rng_seed: seed,
    };
    match &args.grid {
        Some(grid) => {
            let reports = simulation::run_grid(&effects, &scenario, &parse_grid(grid)?)?;
            match cli.format {
                ReportFormat::Tsv => Ok(io::scenario_table_tsv(&reports)),
                ReportFormat::Json => io::to_json(&envelope("focusmr/simulate-grid", Some(seed), GridBody { scenarios: reports })),
            }
        }
        None => {
            let report = simulation::run_scenario(&effects, &scenario)?;
            match cli.format {
                ReportFormat::Tsv => Ok(io::scenario_table_tsv(std::slice::from_ref(&report))),
                ReportFormat::Json => io::to_json(&envelope("focusmr/simulate", Some(seed), report)),
            }
        }
    }
}

#[derive(Serialize)]
struct GridBody {
    scenarios: Vec<simulation::ScenarioReport>,
}

/// Parses `args` (including the program name) and runs, returning the exit code.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match run(&cli) {
            Ok(()) => 0,
            Err(e) => exit_code(&e),
        },
        Err(_) => 2,
    }
}
