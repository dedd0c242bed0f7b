//! Command-line front end: `generate`, `solve`, `verify`, `bench`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use lbdd_core::{
    asral_solve, greedy_solve, oracle_solve, strict_solve, Clock, Cost, OracleMode,
    ProblemInstance, SequentialEngine, SolveOptions, SolveReport, SolveStats, SolverKind, Timings,
};
use serde::Serialize;

use crate::format::{self, BenchRow, FormatError};
use crate::instgen::{self, CostSource, GenConfig, GenError};
use crate::parallel::{ParallelConfig, ParallelEngine, ParallelError, Phases};

/// Monotonic wall clock measured from construction.
#[derive(Debug, Clone, Copy)]
pub struct WallClock {
    origin: Instant,
}

impl WallClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for WallClock {
    fn now_nanos(&self) -> u64 {
        self.origin.elapsed().as_nanos() as u64
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Solve(#[from] lbdd_core::Error),
    #[error(transparent)]
    Parallel(#[from] ParallelError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(clap::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Format(FormatError::Solver(lbdd_core::Error::InvalidInstance(_))) => "validation",
            CliError::Format(_) => "format",
            CliError::Generate(_) => "generate",
            CliError::Solve(lbdd_core::Error::InvalidInstance(_)) => "validation",
            CliError::Solve(_) => "solve",
            CliError::Parallel(_) => "parallel",
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
        }
    }

    /// Single-line JSON error record.
    pub fn to_record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: &'a str,
            message: String,
        }
        serde_json::to_string(&Record {
            error: self.kind(),
            message: self.to_string(),
        })
        .expect("plain data serializes")
    }
}

#[derive(Debug, Parser)]
#[command(name = "lbdd", version, about = "Load balanced demand distribution solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic instance.
    Generate(GenerateArgs),
    /// Solve an instance and write a report.
    Solve(SolveArgs),
    /// Run asral, strict and the exact oracle and print the gaps.
    Verify(VerifyArgs),
    /// Sweep generated instances and write one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "500", value_parser = parse_ratio)]
    pub ratio: usize,
    #[arg(long, default_value_t = 0.7)]
    pub theta: f64,
    #[arg(long, default_value = "1:200", value_parser = parse_range)]
    pub penalty_range: (Cost, Cost),
    /// `euclidean` or `road:NODES:AVG_DEGREE`.
    #[arg(long, default_value = "euclidean", value_parser = parse_cost_source)]
    pub cost_source: CostSource,
    /// Fail instead of producing an instance with zero total capacity.
    #[arg(long)]
    pub strict: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value = "relaxation,index_update")]
    pub parallel_phases: Phases,
    #[arg(long)]
    pub refine_to_fixpoint: bool,
    /// Assert after every refinement that no negative cycle remains.
    #[arg(long)]
    pub check_invariants: bool,
}

impl EngineArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            refine_to_fixpoint: self.refine_to_fixpoint,
            check_invariants: self.check_invariants,
        }
    }

    fn parallel(&self) -> ParallelConfig {
        ParallelConfig {
            workers: self.workers,
            phases: self.parallel_phases,
            ..ParallelConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, default_value = "asral")]
    pub solver: SolverKind,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long = "theta", value_delimiter = ',', default_value = "0.3,0.7")]
    pub thetas: Vec<f64>,
    #[arg(long = "penalty-range", value_delimiter = ',', default_value = "1:200,200:400", value_parser = parse_range)]
    pub penalty_ranges: Vec<(Cost, Cost)>,
    #[arg(long = "ratio", value_delimiter = ',', default_value = "500,600,700,800,900", value_parser = parse_ratio)]
    pub ratios: Vec<usize>,
    #[arg(long = "seed", value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    #[arg(long = "solver", value_delimiter = ',', default_value = "asral,greedy")]
    pub solvers: Vec<SolverKind>,
    #[arg(long, default_value = "euclidean", value_parser = parse_cost_source)]
    pub cost_source: CostSource,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(Cost, Cost), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<Cost>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

/// Accepts `500` or `500:1`.
fn parse_ratio(s: &str) -> Result<usize, String> {
    let (demands, centers) = s.split_once(':').unwrap_or((s, "1"));
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    let (demands, centers) = (parse(demands)?, parse(centers)?);
    if centers == 0 || demands < centers {
        return Err(format!("ratio `{s}` must be at least 1:1"));
    }
    Ok(demands / centers)
}

fn parse_cost_source(s: &str) -> Result<CostSource, String> {
    if s == "euclidean" {
        return Ok(CostSource::Euclidean);
    }
    let mut parts = s.split(':');
    match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some("road"), Some(nodes), Some(degree), None) => Ok(CostSource::RoadGraph {
            nodes: nodes.parse().map_err(|e| format!("`{nodes}`: {e}"))?,
            avg_degree: degree.parse().map_err(|e| format!("`{degree}`: {e}"))?,
        }),
        _ => Err(format!("expected `euclidean` or `road:NODES:AVG_DEGREE`, got `{s}`")),
    }
}

/// Runs any solver kind. The oracle solves the penalized problem.
pub fn solve_with(
    instance: &ProblemInstance,
    solver: SolverKind,
    options: &SolveOptions,
    parallel: &ParallelConfig,
) -> Result<SolveReport, CliError> {
    let clock = WallClock::new();
    let report = match solver {
        SolverKind::Asral => asral_solve(instance, options, &SequentialEngine, &clock)?,
        SolverKind::ParaAsral => {
            let engine = ParallelEngine::new(*parallel)?;
            let mut r = asral_solve(instance, options, &engine, &clock)?;
            r.solver = SolverKind::ParaAsral;
            r
        }
        SolverKind::Strict => strict_solve(instance, options, &SequentialEngine, &clock)?,
        SolverKind::Greedy => greedy_solve(instance, &clock)?,
        SolverKind::Oracle => {
            let sol = oracle_solve(instance, OracleMode::Penalized)?;
            let total_ns = clock.now_nanos();
            SolveReport {
                solver: SolverKind::Oracle,
                objective: sol.objective,
                assignment: sol.assignment,
                surcharge: 0,
                unserved: Vec::new(),
                stats: SolveStats::default(),
                timings: Timings {
                    other_ns: total_ns,
                    total_ns,
                    ..Timings::default()
                },
            }
        }
    };
    Ok(report)
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Usage)?;
    match cli.command {
        Command::Generate(args) => generate(args, stdout),
        Command::Solve(args) => solve(args, stdout),
        Command::Verify(args) => verify(args, stdout),
        Command::Bench(args) => bench(args, stdout),
    }
}

fn generate(args: GenerateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let instance = instgen::generate(&GenConfig {
        seed: args.seed,
        n: args.n,
        ratio: args.ratio,
        theta: args.theta,
        penalty_range: args.penalty_range,
        cost_source: args.cost_source,
        strict: args.strict,
    })?;
    emit(&args.out, &format::instance_to_json(&instance), stdout)
}

fn solve(args: SolveArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let instance = format::read_instance(&args.instance)?;
    let report = solve_with(&instance, args.solver, &args.engine.options(), &args.engine.parallel())?;
    emit(&args.out, &format::report_to_json(&report), stdout)
}

fn verify(args: VerifyArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let instance = format::read_instance(&args.instance)?;
    let options = args.engine.options();
    let asral = asral_solve(&instance, &options, &SequentialEngine, &WallClock::new())?;
    let oracle = oracle_solve(&instance, OracleMode::Penalized)?;
    let strict = strict_solve(&instance, &options, &SequentialEngine, &WallClock::new())?;
    let strict_oracle = oracle_solve(&instance, OracleMode::StrictAugmented)?;
    let strict_total = strict.objective + strict.surcharge;
    writeln!(
        stdout,
        "gap asral-oracle {} (asral {}, oracle {})",
        asral.objective - oracle.objective,
        asral.objective,
        oracle.objective
    )?;
    writeln!(
        stdout,
        "gap strict-oracle {} (strict {}, oracle {}, surcharge {})",
        strict_total - strict_oracle.objective,
        strict_total,
        strict_oracle.objective,
        strict.surcharge
    )?;
    Ok(())
}

/// The sweep grid in row order: solver-major, then theta, penalty range,
/// ratio, seed.
pub fn bench_rows(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    let options = args.engine.options();
    let parallel = args.engine.parallel();
    let mut rows = Vec::new();
    for &solver in &args.solvers {
        for &theta in &args.thetas {
            for &(lo, hi) in &args.penalty_ranges {
                for &ratio in &args.ratios {
                    for &seed in &args.seeds {
                        let instance = instgen::generate(&GenConfig {
                            seed,
                            n: args.n,
                            ratio,
                            theta,
                            penalty_range: (lo, hi),
                            cost_source: args.cost_source,
                            strict: solver == SolverKind::Strict,
                        })?;
                        let report = solve_with(&instance, solver, &options, &parallel)?;
                        let t = report.timings;
                        rows.push(BenchRow {
                            solver: solver.name().to_owned(),
                            theta,
                            penalty_lo: lo,
                            penalty_hi: hi,
                            ratio,
                            seed,
                            n: instance.n(),
                            k: instance.k(),
                            objective: report.objective,
                            wall_ns: t.total_ns,
                            index_update_ns: t.index_update_ns,
                            bellman_ford_ns: t.bellman_ford_ns,
                            other_ns: t.other_ns,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn bench(args: BenchArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let rows = bench_rows(&args)?;
    match &args.out {
        Some(path) => format::write_bench_csv(fs::File::create(path)?, &rows)?,
        None => format::write_bench_csv(stdout, &rows)?,
    }
    Ok(())
}

/// Entry point for the binary: prints a JSON error record to stderr on
/// failure and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(args, &mut lock) {
        Ok(()) => 0,
        Err(CliError::Usage(e)) if !e.use_stderr() => {
            let _ = write!(lock, "{e}");
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_record());
            if matches!(e, CliError::Usage(_)) {
                2
            } else {
                1
            }
        }
    }
}
