use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fdgrad::initial_tau;
use crate::scalar::Real;

/// How the finite differences treat the feasible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundMode {
    /// Offset points may leave Ω.
    #[default]
    Relaxable,
    /// Ω is a box the objective cannot be evaluated outside of.
    UnrelaxableBox,
}

impl FromStr for BoundMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relaxable" => Ok(BoundMode::Relaxable),
            "unrelaxable" | "unrelaxable-box" => Ok(BoundMode::UnrelaxableBox),
            other => Err(Error::InvalidConfig(format!(
                "mode must be `relaxable` or `unrelaxable`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for BoundMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundMode::Relaxable => "relaxable",
            BoundMode::UnrelaxableBox => "unrelaxable",
        })
    }
}

/// Trust-region subproblem strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubproblemSolver {
    /// Truncated CG without constraints, safeguarded projected FISTA otherwise.
    #[default]
    Auto,
    /// Cauchy step, or the generalized Cauchy step under constraints.
    Cauchy,
    /// Unconstrained problems only.
    TruncatedCg,
    ProjectedAccel,
}

impl FromStr for SubproblemSolver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "cauchy" => Ok(Self::Cauchy),
            "tcg" | "truncated-cg" => Ok(Self::TruncatedCg),
            "accel" | "projected-accel" => Ok(Self::ProjectedAccel),
            other => Err(Error::InvalidConfig(format!("unknown subproblem solver `{other}`"))),
        }
    }
}

impl fmt::Display for SubproblemSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Cauchy => "cauchy",
            Self::TruncatedCg => "tcg",
            Self::ProjectedAccel => "accel",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub epsilon: T,
    /// Estimate of the gradient's Lipschitz constant.
    pub sigma: T,
    /// Acceptance threshold on the reduction ratio, in `(0, 1)`.
    pub alpha: T,
    pub delta0: T,
    pub delta_max: T,
    /// Budget in simplex gradients (`n + 1` evaluations each).
    pub budget_simplex_gradients: usize,
    /// Hard evaluation cap overriding the simplex-gradient budget.
    pub max_evaluations: Option<usize>,
    pub delta_stop: T,
    pub mode: BoundMode,
    pub subproblem: SubproblemSolver,
    /// Evaluate finite-difference offsets concurrently when the oracle allows.
    pub parallel_fd: bool,
}

/// Defaults: `ε = 1e−5`, `α = 0.01`, `σ = ε/(√n √eps)`,
/// `Δ₀ = max{1, τ₀√n}`, `Δ_max = max{1000, Δ₀}`, 100 simplex gradients and
/// `Δ_k ≤ 1e−13` as stopping radius.
pub fn default_config<T: Real>(n: usize) -> SolverConfig<T> {
    let n = n.max(1);
    let epsilon = T::lit(1e-5);
    let sqrt_n = T::from_count(n).sqrt();
    let sigma = epsilon / (sqrt_n * T::epsilon().sqrt());
    let tau0 = initial_tau(epsilon, sigma, n);
    let delta0 = T::one().max(tau0 * sqrt_n);
    SolverConfig {
        epsilon,
        sigma,
        alpha: T::lit(0.01),
        delta0,
        delta_max: T::lit(1000.0).max(delta0),
        budget_simplex_gradients: 100,
        max_evaluations: None,
        delta_stop: T::lit(1e-13),
        mode: BoundMode::Relaxable,
        subproblem: SubproblemSolver::Auto,
        parallel_fd: false,
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn tau0(&self, n: usize) -> T {
        initial_tau(self.epsilon, self.sigma, n)
    }

    /// Total objective evaluations allowed for an `n`-dimensional problem.
    pub fn evaluation_budget(&self, n: usize) -> usize {
        self.max_evaluations
            .unwrap_or(self.budget_simplex_gradients.saturating_mul(n + 1))
    }

    /// Checks `α ∈ (0,1)`, positivity, and `τ₀√n ≤ Δ₀ ≤ Δ_max`.
    pub fn validate(&self, n: usize) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("sigma", self.sigma),
            ("delta0", self.delta0),
            ("delta_max", self.delta_max),
            ("delta_stop", self.delta_stop),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if n == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        let tau_sqrt_n = self.tau0(n) * T::from_count(n).sqrt();
        if !(tau_sqrt_n <= self.delta0) {
            return Err(Error::InvalidConfig(format!(
                "need tau0*sqrt(n) <= delta0, got {tau_sqrt_n} > {}",
                self.delta0
            )));
        }
        if !(self.delta0 <= self.delta_max) {
            return Err(Error::InvalidConfig(format!(
                "need delta0 <= delta_max, got {} > {}",
                self.delta0, self.delta_max
            )));
        }
        if self.evaluation_budget(n) == 0 {
            return Err(Error::InvalidConfig("evaluation budget must be positive".into()));
        }
        Ok(())
    }
}
