//! `trfds` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when the
//! solver or the objective oracle fails.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trfds::{BoundMode, SubproblemSolver};

use commands::{BenchArgs, CalibrateArgs, ProblemSource, SolveArgs};
use settings::{FileSettings, SolverOverrides};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Failure(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "failure: {m}"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "trfds", version, about = "Finite-difference trust-region solver for black-box objectives")]
struct Cli {
    /// Flat key=value file; flags take precedence over its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving every output file.
    #[arg(long, global = true, default_value = "trfds-out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Minimize one problem and write its history.
    Solve(SolveFlags),
    /// Run a problem suite and write data profiles.
    Bench(BenchFlags),
    /// Solve with exact-gradient diagnostics and print key=value lines.
    Diagnose(SolveFlags),
    /// Fit the predator-prey model to a synthetic dataset.
    Calibrate(CalibrateFlags),
}

#[derive(Debug, Args)]
struct SolverFlags {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long)]
    delta_max: Option<f64>,
    #[arg(long)]
    delta_stop: Option<f64>,
    /// relaxable | unrelaxable
    #[arg(long)]
    mode: Option<BoundMode>,
    /// auto | cauchy | tcg | accel
    #[arg(long)]
    subproblem: Option<SubproblemSolver>,
    /// Evaluate difference points concurrently when the oracle allows it.
    #[arg(long)]
    parallel_fd: Option<bool>,
}

impl SolverFlags {
    fn overrides(&self) -> SolverOverrides {
        SolverOverrides {
            epsilon: self.epsilon,
            sigma: self.sigma,
            alpha: self.alpha,
            delta0: self.delta0,
            delta_max: self.delta_max,
            delta_stop: self.delta_stop,
            mode: self.mode,
            subproblem: self.subproblem,
            parallel_fd: self.parallel_fd,
        }
    }
}

#[derive(Debug, Args)]
struct SolveFlags {
    /// Registry name such as `rosenbrock`, `quadratic:10` or `bard`.
    #[arg(long)]
    problem: Option<String>,
    /// External objective: reads coordinates per line, writes one value.
    #[arg(long)]
    command: Option<String>,
    /// Comma-separated starting point.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Uniform box `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    bounds: Option<String>,
    /// Budget in simplex gradients.
    #[arg(long)]
    budget: Option<usize>,
    /// Hard cap on objective evaluations.
    #[arg(long)]
    max_evaluations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args)]
struct BenchFlags {
    /// Comma-separated registry names; defaults to the built-in least-squares set.
    #[arg(long)]
    problems: Option<String>,
    /// Uniform box `lo,hi` applied to every problem.
    #[arg(long, allow_hyphen_values = true)]
    bounds: Option<String>,
    /// Comma-separated convergence tolerances in (0, 1).
    #[arg(long)]
    tolerances: Option<String>,
    /// Budget in simplex gradients per run.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<BoundMode>,
}

#[derive(Debug, Args)]
struct CalibrateFlags {
    #[arg(long)]
    seed: Option<u64>,
    /// Budget in objective evaluations.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    noise_scale: Option<f64>,
}

fn solve_args(flags: SolveFlags, file: &FileSettings, out_dir: PathBuf) -> Result<SolveArgs, CliError> {
    Ok(SolveArgs {
        source: ProblemSource {
            problem: file.pick(flags.problem, "problem")?,
            command: flags.command,
            x0: flags.x0,
            bounds: file.pick(flags.bounds, "bounds")?,
            seed: file.pick(flags.seed, "seed")?.unwrap_or(0),
        },
        overrides: flags.solver.overrides().merged(file)?,
        budget: file.pick(flags.budget, "budget")?,
        max_evaluations: file.pick(flags.max_evaluations, "max_evaluations")?,
        out_dir,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileSettings::load(cli.config.as_deref())?;
    match cli.command {
        Command::Solve(flags) => commands::solve_cmd(solve_args(flags, &file, cli.out_dir)?),
        Command::Diagnose(flags) => commands::diagnose_cmd(solve_args(flags, &file, cli.out_dir)?),
        Command::Bench(flags) => commands::bench_cmd(BenchArgs {
            problems: file.pick(flags.problems, "problems")?,
            bounds: file.pick(flags.bounds, "bounds")?,
            tolerances: file.pick(flags.tolerances, "tolerances")?,
            budget: file.pick(flags.budget, "budget")?,
            seed: file.pick(flags.seed, "seed")?.unwrap_or(0),
            mode: file.pick(flags.mode, "mode")?,
            out_dir: cli.out_dir,
        }),
        Command::Calibrate(flags) => commands::calibrate_cmd(CalibrateArgs {
            seed: file.pick(flags.seed, "seed")?.unwrap_or(7),
            budget: file.pick(flags.budget, "budget")?,
            noise_scale: file.pick(flags.noise_scale, "noise_scale")?,
            out_dir: cli.out_dir,
        }),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
