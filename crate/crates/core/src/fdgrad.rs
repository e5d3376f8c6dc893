//! Finite-difference gradients built from objective values only.
//!
//! Two schemes are provided: plain forward differences with a common
//! stepsize, and the bound-respecting variant that shortens each step to stay
//! inside a box and falls back to a backward difference when the forward room
//! is smaller than the backward room.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::{FeasibleSet, Problem};
use crate::scalar::Real;

/// Approximate gradient together with the stepsizes that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FdGradient<T> {
    pub g: Vec<T>,
    /// Signed per-coordinate stepsize: positive for a forward difference,
    /// negative for a backward one.
    pub tau_used: Vec<T>,
    pub evals_spent: usize,
}

impl<T: Real> FdGradient<T> {
    /// Largest stepsize magnitude used.
    pub fn tau_max(&self) -> T {
        self.tau_used
            .iter()
            .fold(T::zero(), |acc, t| acc.max(t.abs()))
    }
}

/// `τ₀ = ε / (σ √n)`
pub fn initial_tau<T: Real>(epsilon: T, sigma: T, n: usize) -> T {
    epsilon / (sigma * T::from_count(n).sqrt())
}

fn evaluate_points<T: Real>(problem: &Problem<T>, points: &[Vec<T>], parallel: bool) -> Result<Vec<T>> {
    if parallel && problem.objective_is_concurrent() {
        points.par_iter().map(|p| problem.evaluate(p)).collect()
    } else {
        points.iter().map(|p| problem.evaluate(p)).collect()
    }
}

/// `g_i = (f(x + τ e_i) − f(x)) / τ`, using `fx = f(x)` from the caller.
pub fn forward_gradient<T: Real>(problem: &Problem<T>, x: &[T], tau: T, fx: T) -> Result<FdGradient<T>> {
    forward_gradient_impl(problem, x, tau, fx, false)
}

pub(crate) fn forward_gradient_impl<T: Real>(
    problem: &Problem<T>,
    x: &[T],
    tau: T,
    fx: T,
    parallel: bool,
) -> Result<FdGradient<T>> {
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            got: x.len(),
        });
    }
    if !(tau > T::zero()) {
        return Err(Error::InvalidConfig(format!("stepsize must be positive, got {tau}")));
    }
    let points: Vec<Vec<T>> = (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            p[i] += tau;
            p
        })
        .collect();
    let values = evaluate_points(problem, &points, parallel)?;
    Ok(FdGradient {
        g: values.iter().map(|&f| (f - fx) / tau).collect(),
        tau_used: vec![tau; x.len()],
        evals_spent: x.len(),
    })
}

/// Bound-respecting differences over a box.
///
/// Per coordinate, `τF = min(u_i − x_i, τ)` and `τB = min(x_i − ℓ_i, τ)`; a
/// forward difference with `τF` is used when `τF ≥ τB`, otherwise a backward
/// difference with `τB`. Every requested point lies in the box.
pub fn bounded_gradient<T: Real>(
    problem: &Problem<T>,
    x: &[T],
    tau: T,
    fx: T,
    set: &FeasibleSet<T>,
) -> Result<FdGradient<T>> {
    bounded_gradient_impl(problem, x, tau, fx, set, false)
}

pub(crate) fn bounded_gradient_impl<T: Real>(
    problem: &Problem<T>,
    x: &[T],
    tau: T,
    fx: T,
    set: &FeasibleSet<T>,
    parallel: bool,
) -> Result<FdGradient<T>> {
    let (lower, upper) = match set {
        FeasibleSet::Box { lower, upper } => (lower, upper),
        _ => {
            return Err(Error::InvalidSet(
                "bound-respecting differences need a box".into(),
            ))
        }
    };
    if x.len() != lower.len() || x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: lower.len(),
            got: x.len(),
        });
    }
    if !(tau > T::zero()) {
        return Err(Error::InvalidConfig(format!("stepsize must be positive, got {tau}")));
    }
    let n = x.len();
    let mut points = Vec::with_capacity(n);
    let mut steps = Vec::with_capacity(n);
    for i in 0..n {
        let tau_f = (upper[i] - x[i]).min(tau);
        let tau_b = (x[i] - lower[i]).min(tau);
        let mut p = x.to_vec();
        // The offset coordinate is clamped onto the face so rounding in
        // `x + τ` can never leave the box; the divisor is then the exact
        // distance actually travelled.
        let step = if tau_f >= tau_b {
            let target = x[i] + tau_f;
            if target > upper[i] {
                p[i] = upper[i];
                p[i] - x[i]
            } else {
                p[i] = target;
                tau_f
            }
        } else {
            let target = x[i] - tau_b;
            if target < lower[i] {
                p[i] = lower[i];
                -(x[i] - p[i])
            } else {
                p[i] = target;
                -tau_b
            }
        };
        if step.is_zero() {
            return Err(Error::DegenerateCoordinate(i));
        }
        points.push(p);
        steps.push(step);
    }
    let values = evaluate_points(problem, &points, parallel)?;
    let g = values
        .iter()
        .zip(&steps)
        .map(|(&f, &h)| {
            if h > T::zero() {
                (f - fx) / h
            } else {
                (fx - f) / (-h)
            }
        })
        .collect();
    Ok(FdGradient {
        g,
        tau_used: steps,
        evals_spent: n,
    })
}
