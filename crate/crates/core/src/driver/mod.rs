//! Outer trust-region loop.
//!
//! Each iteration either accepts the trial point, shrinks the radius while
//! keeping the gradient and Hessian approximations, or shrinks the radius,
//! halves the finite-difference stepsize and rebuilds the gradient. The
//! invariant `τ√n ≤ Δ` holds at the start of every iteration.

mod config;
mod record;
mod update;

pub use config::{default_config, BoundMode, SolverConfig, SubproblemSolver};
pub use record::{IterationLog, RunRecord, Termination};
pub use update::{bfgs_update, classify_and_update, rho, IterationClass, RadiusUpdate};

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::fdgrad::{bounded_gradient_impl, forward_gradient_impl, FdGradient};
use crate::linalg::{add, all_finite, is_zero, sub, Matrix};
use crate::problem::{FeasibleSet, Problem};
use crate::scalar::Real;
use crate::subproblem::{
    cauchy_step, generalized_cauchy_step, projected_accel, truncated_cg, QuadraticModel, TrialStep,
};

/// State handed to an observer once per iteration, after the step has been
/// classified and before the iterate moves.
#[derive(Debug)]
pub struct IterationView<'a, T> {
    pub k: usize,
    pub x: &'a [T],
    pub fx: T,
    pub delta: T,
    pub tau: T,
    pub gradient: &'a FdGradient<T>,
    pub gradient_rebuilt: bool,
    pub model: &'a QuadraticModel<T>,
    pub step: &'a TrialStep<T>,
    pub rho: Option<T>,
    pub update: RadiusUpdate<T>,
}

pub fn solve<T: Real>(problem: &Problem<T>, config: &SolverConfig<T>) -> Result<RunRecord<T>> {
    solve_with_observer(problem, config, |_| {})
}

struct Tracker<T> {
    start: usize,
    seen: usize,
    history: Vec<T>,
    best: Option<(Vec<T>, T)>,
}

impl<T: Real> Tracker<T> {
    fn sync(&mut self, problem: &Problem<T>) {
        for e in problem.evaluations_since(self.start + self.seen) {
            self.seen += 1;
            if e.feasible && e.value.is_finite() && self.best.as_ref().is_none_or(|(_, b)| e.value < *b) {
                self.best = Some((e.point, e.value));
            }
            let current = self.best.as_ref().map_or(T::nan(), |(_, b)| *b);
            self.history.push(current);
        }
    }
}

fn compute_step<T: Real>(
    model: &QuadraticModel<T>,
    delta: T,
    set: &FeasibleSet<T>,
    x: &[T],
    strategy: SubproblemSolver,
) -> Result<TrialStep<T>> {
    match (set.is_all_space(), strategy) {
        (true, SubproblemSolver::Auto | SubproblemSolver::TruncatedCg) => truncated_cg(model, delta),
        (true, SubproblemSolver::Cauchy) => cauchy_step(model, delta),
        (false, SubproblemSolver::Cauchy) => generalized_cauchy_step(model, delta, set, x),
        (false, SubproblemSolver::TruncatedCg) => Err(Error::InvalidConfig(
            "truncated CG needs an unconstrained problem".into(),
        )),
        (_, SubproblemSolver::Auto | SubproblemSolver::ProjectedAccel) => {
            let gcp = generalized_cauchy_step(model, delta, set, x)?;
            if gcp.degenerate {
                return Ok(gcp);
            }
            projected_accel(model, delta, set, x, &gcp)
        }
    }
}

/// Point actually sent to the oracle: `x + d` pulled back into Ω.
fn trial_point<T: Real>(set: &FeasibleSet<T>, x: &[T], d: &[T]) -> Vec<T> {
    let raw = add(x, d);
    if set.contains(&raw) {
        raw
    } else {
        set.project_unchecked(&raw)
    }
}

/// Runs the solver, calling `observer` once per iteration.
///
/// An oracle failure at the starting point is returned as an error; later
/// failures end the run with [`Termination::OracleFailure`].
pub fn solve_with_observer<T, F>(
    problem: &Problem<T>,
    config: &SolverConfig<T>,
    mut observer: F,
) -> Result<RunRecord<T>>
where
    T: Real,
    F: FnMut(&IterationView<'_, T>),
{
    let n = problem.dim();
    config.validate(n)?;
    let set = problem.feasible_set();
    match config.mode {
        BoundMode::UnrelaxableBox if !set.is_box() => {
            return Err(Error::InvalidConfig(
                "unrelaxable mode needs box constraints".into(),
            ))
        }
        BoundMode::Relaxable if problem.is_unrelaxable() && !set.is_all_space() => {
            return Err(Error::InvalidConfig(
                "problem constraints are unrelaxable; use the unrelaxable mode".into(),
            ))
        }
        _ => {}
    }
    if config.subproblem == SubproblemSolver::TruncatedCg && !set.is_all_space() {
        return Err(Error::InvalidConfig(
            "truncated CG needs an unconstrained problem".into(),
        ));
    }

    let budget = config.evaluation_budget(n);
    let mut tracker = Tracker {
        start: problem.evaluation_count(),
        seen: 0,
        history: Vec::new(),
        best: None,
    };
    let spent = |t: &Tracker<T>| t.seen;

    let mut x = problem.x0().to_vec();
    let mut fx = problem.evaluate(&x)?;
    tracker.sync(problem);

    let mut delta = config.delta0;
    let mut tau = config.tau0(n);
    let mut h = Matrix::identity(n);
    let mut grad: Option<FdGradient<T>> = None;
    let mut pending_bfgs: Option<(Vec<T>, Vec<T>)> = None;
    let mut iterations = Vec::new();
    let mut radius_violations = 0;
    let mut monotonicity_violations = 0;
    let sqrt_n = T::from_count(n).sqrt();

    let termination = 'outer: loop {
        if delta <= config.delta_stop {
            break Termination::DeltaStop;
        }
        let remaining = budget.saturating_sub(spent(&tracker));
        let rebuilt = grad.is_none();
        if rebuilt {
            if remaining < n + 1 {
                break Termination::Budget;
            }
            let built = match config.mode {
                BoundMode::Relaxable => forward_gradient_impl(problem, &x, tau, fx, config.parallel_fd),
                BoundMode::UnrelaxableBox => {
                    bounded_gradient_impl(problem, &x, tau, fx, set, config.parallel_fd)
                }
            };
            tracker.sync(problem);
            let built = match built {
                Ok(g) => g,
                Err(Error::Oracle(e)) => break Termination::OracleFailure(e.to_string()),
                Err(e) => return Err(e),
            };
            if !all_finite(&built.g) {
                break Termination::OracleFailure("non-finite finite-difference gradient".into());
            }
            if let Some((s, g_old)) = pending_bfgs.take() {
                let y = sub(&built.g, &g_old);
                if let Some(next) = bfgs_update(&h, &s, &y) {
                    h = next;
                }
            }
            grad = Some(built);
        } else if remaining < 1 {
            break Termination::Budget;
        }
        let gradient = grad.as_ref().expect("gradient present");
        if is_zero(&gradient.g) {
            break Termination::StationaryFlag;
        }
        if tau * sqrt_n > delta {
            radius_violations += 1;
        }

        let model = QuadraticModel {
            f0: fx,
            g: gradient.g.clone(),
            h: h.clone(),
        };
        let step = compute_step(&model, delta, set, &x, config.subproblem)?;

        let mut trial = None;
        if !step.degenerate && step.model_decrease > T::zero() {
            let point = trial_point(set, &x, &step.d);
            let d = sub(&point, &x);
            let mdec = model.decrease(&d);
            if mdec > T::zero() {
                if budget.saturating_sub(spent(&tracker)) < 1 {
                    break 'outer Termination::Budget;
                }
                let f_trial = problem.evaluate(&point);
                tracker.sync(problem);
                match f_trial {
                    Ok(v) => trial = Some((point, d, mdec, v)),
                    Err(Error::Oracle(e)) => break 'outer Termination::OracleFailure(e.to_string()),
                    Err(e) => return Err(e),
                }
            }
        }
        let ratio = trial
            .as_ref()
            .and_then(|(_, _, mdec, f_new)| rho(fx, *f_new, *mdec).ok());
        let update = classify_and_update(ratio, delta, tau, n, config);
        observer(&IterationView {
            k: iterations.len(),
            x: &x,
            fx,
            delta,
            tau,
            gradient,
            gradient_rebuilt: rebuilt,
            model: &model,
            step: &step,
            rho: ratio,
            update,
        });
        let model_decrease = trial.as_ref().map_or(T::zero(), |t| t.2);
        debug!(
            "k={} class={} delta={} tau={} rho={:?} f={}",
            iterations.len(),
            update.class,
            delta,
            tau,
            ratio.map(|r| r.as_f64()),
            fx
        );

        match update.class {
            IterationClass::S => {
                let (point, d, _, f_new) = trial.expect("accepted step has a trial point");
                if f_new > fx {
                    monotonicity_violations += 1;
                }
                let g_old = grad.take().expect("gradient present").g;
                pending_bfgs = Some((d, g_old));
                x = point;
                fx = f_new;
            }
            IterationClass::U1 => {}
            IterationClass::U2 => {
                grad = None;
                pending_bfgs = None;
            }
        }
        iterations.push(IterationLog {
            k: iterations.len(),
            class: update.class,
            delta,
            tau,
            rho: ratio,
            model_decrease,
            f: fx,
            evaluations: spent(&tracker),
            gradient_rebuilt: rebuilt,
        });
        delta = update.delta;
        tau = update.tau;
    };

    if let Termination::OracleFailure(msg) = &termination {
        warn!("{}: run ended by oracle failure: {msg}", problem.name());
    }
    let (x_best, f_best) = tracker.best.clone().unwrap_or_else(|| (x.clone(), fx));
    Ok(RunRecord {
        best_history: tracker.history,
        iterations,
        termination,
        evaluations: tracker.seen,
        x_best,
        f_best,
        x_final: x,
        f_final: fx,
        radius_violations,
        monotonicity_violations,
    })
}
