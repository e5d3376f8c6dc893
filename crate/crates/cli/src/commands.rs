use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use trfds::bench::{self, ConvergenceTest, ProblemSpec, SolverVariant, DEFAULT_TOLERANCES};
use trfds::driver::IterationClass;
use trfds::odecalib::{self, PredPreyParams, INITIAL_GUESS};
use trfds::problem::{registry, SubprocessOracle};
use trfds::stationarity::{eta_report, measure_gap, StationarityReport};
use trfds::{solve, solve_with_observer, BoundMode, FeasibleSet, Problem64, RunRecord64, SubproblemSolver, Termination};

use crate::settings::{parse_bounds, parse_list, SolverOverrides};
use crate::CliError;

fn out_path(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Failure(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir.join(name))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = out_path(dir, name)?;
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Where the objective comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSource {
    pub problem: Option<String>,
    pub command: Option<String>,
    pub x0: Option<String>,
    pub bounds: Option<String>,
    pub seed: u64,
}

impl ProblemSource {
    pub fn build(&self, mode: BoundMode) -> Result<Problem64, CliError> {
        let mut p = match (&self.problem, &self.command) {
            (Some(_), Some(_)) => return Err(usage("--problem and --command are mutually exclusive")),
            (_, Some(cmd)) => {
                let x0 = self
                    .x0
                    .as_deref()
                    .ok_or_else(|| usage("--command needs --x0"))
                    .and_then(parse_list::<f64>)?;
                if x0.is_empty() {
                    return Err(usage("--x0 is empty"));
                }
                let oracle = SubprocessOracle::<f64>::spawn(cmd).map_err(failure)?;
                Problem64::new("external", x0, Arc::new(oracle))
            }
            (name, None) => {
                let name = name.as_deref().unwrap_or("rosenbrock");
                let p = registry::build::<f64>(name, self.seed).map_err(usage)?;
                match self.x0.as_deref() {
                    None => p,
                    Some(text) => {
                        let x0 = parse_list::<f64>(text)?;
                        if x0.len() != p.dim() {
                            return Err(usage(format!("--x0 has {} entries, problem has {}", x0.len(), p.dim())));
                        }
                        p.with_x0(x0).map_err(usage)?
                    }
                }
            }
        };
        if let Some(text) = &self.bounds {
            let (lo, hi) = parse_bounds(text)?;
            let n = p.dim();
            p = p
                .with_feasible_set(FeasibleSet::uniform_box(n, lo, hi).map_err(usage)?)
                .map_err(usage)?
                .unrelaxable(mode == BoundMode::UnrelaxableBox);
        } else if mode == BoundMode::UnrelaxableBox {
            return Err(usage("--mode unrelaxable needs --bounds"));
        }
        Ok(p)
    }
}

fn print_summary(problem: &Problem64, record: &RunRecord64) {
    println!("problem={}", problem.name());
    println!("n={}", problem.dim());
    println!("termination={}", record.termination);
    println!("evaluations={}", record.evaluations);
    println!("f_best={}", record.f_best);
    println!(
        "x_best={}",
        record.x_best.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    );
    println!(
        "iterations={} successful={} u1={} u2={}",
        record.iterations.len(),
        record.count(IterationClass::S),
        record.count(IterationClass::U1),
        record.count(IterationClass::U2)
    );
}

fn finish(record: &RunRecord64) -> Result<(), CliError> {
    match &record.termination {
        Termination::OracleFailure(msg) => Err(CliError::Failure(format!("oracle failed: {msg}"))),
        _ => Ok(()),
    }
}

pub struct SolveArgs {
    pub source: ProblemSource,
    pub overrides: SolverOverrides,
    pub budget: Option<usize>,
    pub max_evaluations: Option<usize>,
    pub out_dir: PathBuf,
}

pub fn solve_cmd(args: SolveArgs) -> Result<(), CliError> {
    let mode = args.overrides.mode.unwrap_or_default();
    let problem = args.source.build(mode)?;
    let mut config = args.overrides.config(problem.dim())?;
    if let Some(b) = args.budget {
        config.budget_simplex_gradients = b;
    }
    config.max_evaluations = args.max_evaluations;
    config.validate(problem.dim()).map_err(usage)?;
    let record = solve(&problem, &config).map_err(failure)?;
    record
        .write_history_csv(create(&args.out_dir, "history.csv")?)
        .map_err(failure)?;
    record
        .write_iterations_csv(create(&args.out_dir, "iterations.csv")?)
        .map_err(failure)?;
    print_summary(&problem, &record);
    finish(&record)
}

pub struct BenchArgs {
    pub problems: Option<String>,
    pub bounds: Option<String>,
    pub tolerances: Option<String>,
    pub budget: Option<usize>,
    pub seed: u64,
    pub mode: Option<BoundMode>,
    pub out_dir: PathBuf,
}

pub fn bench_cmd(args: BenchArgs) -> Result<(), CliError> {
    let names: Vec<String> = match &args.problems {
        Some(text) => parse_list::<String>(text)?,
        None => registry::MORE_WILD.iter().map(|s| s.to_string()).collect(),
    };
    if names.is_empty() {
        return Err(usage("--problems is empty"));
    }
    for name in &names {
        registry::build::<f64>(name, args.seed).map_err(usage)?;
    }
    let bounds = args.bounds.as_deref().map(parse_bounds).transpose()?;
    let mode = args.mode.unwrap_or_default();
    if mode == BoundMode::UnrelaxableBox && bounds.is_none() {
        return Err(usage("--mode unrelaxable needs --bounds"));
    }
    let tolerances = match &args.tolerances {
        Some(text) => parse_list::<f64>(text)?,
        None => DEFAULT_TOLERANCES.to_vec(),
    };
    let tests = tolerances
        .iter()
        .map(|&t| ConvergenceTest::new(t).map_err(usage))
        .collect::<Result<Vec<_>, _>>()?;
    let budget = args.budget.unwrap_or(100);
    if budget == 0 {
        return Err(usage("--budget must be positive"));
    }
    let specs: Vec<ProblemSpec> = names
        .iter()
        .map(|n| ProblemSpec {
            name: n.clone(),
            bounds,
        })
        .collect();
    let solvers = [
        SolverVariant::new("auto", mode, SubproblemSolver::Auto),
        SolverVariant::new("cauchy", mode, SubproblemSolver::Cauchy),
    ];
    let suite = bench::run_suite(&specs, &solvers, budget, args.seed).map_err(failure)?;
    bench::write_suite_csv(&suite, create(&args.out_dir, "suite.csv")?).map_err(failure)?;
    for e in &suite.entries {
        match (&e.error, e.f_best()) {
            (Some(err), _) => println!("problem={} solver={} error={err}", e.problem, e.solver),
            (None, f) => println!(
                "problem={} solver={} evaluations={} f_best={}",
                e.problem,
                e.solver,
                e.history.len(),
                f.map_or("nan".into(), |v| v.to_string())
            ),
        }
    }
    for (tol, test) in tolerances.iter().zip(tests) {
        let profile = bench::data_profile(&suite.entries, test).map_err(failure)?;
        let stem = out_path(&args.out_dir, &format!("profile_tol{tol:e}"))?;
        let (csv, svg) = bench::render_profile(&profile, &stem, &format!("tolerance {tol:e}")).map_err(failure)?;
        println!("profile={} svg={}", csv.display(), svg.display());
    }
    let failed = suite.entries.iter().filter(|e| e.error.is_some()).count();
    if failed > 0 {
        return Err(CliError::Failure(format!("{failed} runs failed")));
    }
    Ok(())
}

pub fn diagnose_cmd(args: SolveArgs) -> Result<(), CliError> {
    let mode = args.overrides.mode.unwrap_or_default();
    let problem = args.source.build(mode)?;
    let n = problem.dim();
    let mut config = args.overrides.config(n)?;
    if let Some(b) = args.budget {
        config.budget_simplex_gradients = b;
    }
    config.max_evaluations = args.max_evaluations;
    config.validate(n).map_err(usage)?;
    let r = config.delta_max;
    let lipschitz = problem.meta().lipschitz;
    let exact = problem.has_exact_gradient();
    let threshold = lipschitz.map(|l| l / config.sigma * config.epsilon);

    let mut checks = 0usize;
    let mut gap_violations = 0usize;
    let mut half_checks = 0usize;
    let mut half_violations = 0usize;
    let mut oracle_error = None;
    let mut last: Option<(Vec<f64>, Vec<f64>, f64)> = None;
    let record = solve_with_observer(&problem, &config, |v| {
        if !v.gradient_rebuilt {
            return;
        }
        last = Some((v.x.to_vec(), v.gradient.g.clone(), v.gradient.tau_max()));
        let (Some(l), true) = (lipschitz, exact) else {
            return;
        };
        match measure_gap(&problem, v.x, &v.gradient.g, r, v.gradient.tau_max(), l) {
            Ok(report) => {
                checks += 1;
                if report.bound_ok == Some(false) {
                    gap_violations += 1;
                }
                if let (Some(psi), Some(t)) = (report.psi, threshold) {
                    if psi > t && v.tau <= config.tau0(n) {
                        half_checks += 1;
                        if report.eta.partial_cmp(&(0.5 * psi)) != Some(std::cmp::Ordering::Greater) {
                            half_violations += 1;
                        }
                    }
                }
            }
            Err(e) => oracle_error = Some(e.to_string()),
        }
    })
    .map_err(failure)?;
    if let Some(e) = oracle_error {
        return Err(CliError::Failure(e));
    }
    print_summary(&problem, &record);
    println!("radius_violations={}", record.radius_violations);
    println!("monotonicity_violations={}", record.monotonicity_violations);
    if lipschitz.is_some() && exact {
        println!("gap_checks={checks}");
        println!("gap_violations={gap_violations}");
        println!("eta_half_psi_checks={half_checks}");
        println!("eta_half_psi_violations={half_violations}");
    }
    if let Some((x, g, tau)) = last {
        let report: StationarityReport<f64> = match (lipschitz, exact) {
            (Some(l), true) => measure_gap(&problem, &x, &g, r, tau, l).map_err(failure)?,
            _ => eta_report(&g, &x, problem.feasible_set(), r),
        };
        print!("{report}");
    }
    record
        .write_iterations_csv(create(&args.out_dir, "iterations.csv")?)
        .map_err(failure)?;
    finish(&record)
}

pub struct CalibrateArgs {
    pub seed: u64,
    pub budget: Option<usize>,
    pub noise_scale: Option<f64>,
    pub out_dir: PathBuf,
}

pub fn calibrate_cmd(args: CalibrateArgs) -> Result<(), CliError> {
    let budget = args.budget.unwrap_or(odecalib::BUDGET_EVALS);
    if budget < 7 {
        return Err(usage("--budget must allow at least one gradient (7 evaluations)"));
    }
    let noise = args.noise_scale.unwrap_or(odecalib::NOISE_SCALE);
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(usage("--noise-scale must be a nonnegative number"));
    }
    let truth = PredPreyParams::<f64>::truth();
    let data = odecalib::make_dataset_with_noise(&truth, args.seed, noise).map_err(failure)?;
    data.write_csv(create(&args.out_dir, "dataset.csv")?).map_err(failure)?;
    let f0 = odecalib::objective(&data, &INITIAL_GUESS);
    let fit = odecalib::calibrate(&data, &INITIAL_GUESS, odecalib::bounds(), budget).map_err(failure)?;
    fit.write_fit_csv(&data, create(&args.out_dir, "fit.csv")?).map_err(failure)?;
    fit.record
        .write_history_csv(create(&args.out_dir, "history.csv")?)
        .map_err(failure)?;
    println!("seed={}", args.seed);
    println!("noise_scale={noise}");
    println!("f0={f0}");
    println!("f_best={}", fit.record.f_best);
    println!("evaluations={}", fit.record.evaluations);
    println!("termination={}", fit.record.termination);
    println!(
        "params={}",
        fit.params.to_vec().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    );
    finish(&fit.record)
}
