//! Benchmark suites and data profiles.

mod profile;

pub use profile::{
    data_profile, parse_profile_csv, render_profile, write_profile_csv, write_profile_svg,
    ConvergenceTest, DataProfile, DEFAULT_TOLERANCES,
};

use std::io::Write;

use rayon::prelude::*;

use crate::driver::{default_config, solve, BoundMode, SolverConfig, SubproblemSolver, Termination};
use crate::error::{Error, Result};
use crate::problem::{registry, FeasibleSet, Problem};

/// Problem name from the registry, optionally restricted to the box
/// `[lo, hi]ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub name: String,
    pub bounds: Option<(f64, f64)>,
}

impl ProblemSpec {
    pub fn unconstrained(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            bounds: None,
        }
    }

    pub fn boxed(name: impl Into<String>, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            bounds: Some((lo, hi)),
        }
    }

    /// Builds the problem. The box is unrelaxable exactly when `mode` is.
    pub fn build(&self, seed: u64, mode: BoundMode) -> Result<Problem<f64>> {
        let problem = registry::build::<f64>(&self.name, seed)?;
        match self.bounds {
            None => Ok(problem),
            Some((lo, hi)) => {
                let n = problem.dim();
                Ok(problem
                    .with_feasible_set(FeasibleSet::uniform_box(n, lo, hi)?)?
                    .unrelaxable(mode == BoundMode::UnrelaxableBox))
            }
        }
    }
}

/// A labelled solver configuration; the rest comes from the defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverVariant {
    pub label: String,
    pub mode: BoundMode,
    pub subproblem: SubproblemSolver,
}

impl SolverVariant {
    pub fn new(label: impl Into<String>, mode: BoundMode, subproblem: SubproblemSolver) -> Self {
        Self {
            label: label.into(),
            mode,
            subproblem,
        }
    }

    pub fn config(&self, n: usize, budget_simplex: usize) -> SolverConfig<f64> {
        let mut config = default_config(n);
        config.mode = self.mode;
        config.subproblem = self.subproblem;
        config.budget_simplex_gradients = budget_simplex;
        config
    }
}

/// Result of one (problem, solver) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub problem: String,
    pub solver: String,
    pub n: usize,
    /// Best-so-far value after each evaluation.
    pub history: Vec<f64>,
    pub termination: Option<Termination>,
    pub error: Option<String>,
}

impl SuiteEntry {
    pub fn f0(&self) -> Option<f64> {
        self.history.first().copied()
    }

    pub fn f_best(&self) -> Option<f64> {
        self.history.last().copied().filter(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRun {
    pub budget_simplex: usize,
    pub seed: u64,
    /// Problem-major order.
    pub entries: Vec<SuiteEntry>,
}

/// Solves every problem with every variant on the rayon pool.
///
/// Output order and contents depend only on the arguments. A failing pair is
/// recorded with its error and the suite continues.
pub fn run_suite(
    problems: &[ProblemSpec],
    solvers: &[SolverVariant],
    budget_simplex: usize,
    seed: u64,
) -> Result<SuiteRun> {
    if problems.is_empty() || solvers.is_empty() {
        return Err(Error::InvalidConfig("suite needs problems and solvers".into()));
    }
    let jobs: Vec<(&ProblemSpec, &SolverVariant)> = problems
        .iter()
        .flat_map(|p| solvers.iter().map(move |s| (p, s)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|(spec, variant)| run_one(spec, variant, budget_simplex, seed))
        .collect();
    Ok(SuiteRun {
        budget_simplex,
        seed,
        entries,
    })
}

fn run_one(spec: &ProblemSpec, variant: &SolverVariant, budget_simplex: usize, seed: u64) -> SuiteEntry {
    let mut entry = SuiteEntry {
        problem: spec.name.clone(),
        solver: variant.label.clone(),
        n: 0,
        history: Vec::new(),
        termination: None,
        error: None,
    };
    let outcome = spec.build(seed, variant.mode).and_then(|problem| {
        entry.n = problem.dim();
        solve(&problem, &variant.config(problem.dim(), budget_simplex))
    });
    match outcome {
        Ok(record) => {
            entry.history = record.best_history;
            entry.termination = Some(record.termination);
        }
        Err(e) => {
            log::warn!("{} / {}: {e}", spec.name, variant.label);
            entry.error = Some(e.to_string());
        }
    }
    entry
}

/// Writes `problem,solver,eval,best_f`.
pub fn write_suite_csv<W: Write>(suite: &SuiteRun, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["problem", "solver", "eval", "best_f"])?;
    for e in &suite.entries {
        for (i, v) in e.history.iter().enumerate() {
            w.write_record([e.problem.clone(), e.solver.clone(), (i + 1).to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
