//! Objective oracles, feasible sets and problem descriptors.

mod set;
pub mod registry;
pub mod subprocess;

use std::fmt;
use std::sync::{Arc, Mutex, MutexGuard};

pub use set::{project_ball, project_box, FeasibleSet};
pub use subprocess::SubprocessOracle;

use crate::error::{Error, OracleError, Result};
use crate::scalar::Real;

/// A black-box objective: given `x`, all that can be computed is `f(x)`.
pub trait Objective<T>: Send + Sync {
    fn value(&self, x: &[T]) -> Result<T, OracleError>;

    /// Whether distinct points may be evaluated concurrently.
    fn concurrent(&self) -> bool {
        false
    }
}

/// Adapter turning a plain closure into an [`Objective`].
pub struct FnObjective<F>(pub F);

impl<T, F> Objective<T> for FnObjective<F>
where
    F: Fn(&[T]) -> T + Send + Sync,
{
    fn value(&self, x: &[T]) -> Result<T, OracleError> {
        Ok((self.0)(x))
    }

    fn concurrent(&self) -> bool {
        true
    }
}

pub type GradientFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// One recorded objective invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub point: Vec<T>,
    /// `NaN` when the oracle failed.
    pub value: T,
    pub feasible: bool,
}

/// Ordered log of every oracle invocation made through a [`Problem`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OracleTranscript<T> {
    entries: Vec<Evaluation<T>>,
}

impl<T: Real> OracleTranscript<T> {
    pub fn count(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Evaluation<T>] {
        &self.entries
    }

    pub fn all_feasible(&self) -> bool {
        self.entries.iter().all(|e| e.feasible)
    }
}

/// Descriptive data attached to a problem. Never consulted by the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemMeta<T> {
    pub name: String,
    /// Lipschitz constant of the gradient, when known.
    pub lipschitz: Option<T>,
    pub f_star: Option<T>,
    /// Polyak–Łojasiewicz constant, when known.
    pub pl_constant: Option<T>,
    pub x0: Vec<T>,
}

/// Optimization problem: objective oracle, feasible set and starting point.
pub struct Problem<T> {
    n: usize,
    objective: Arc<dyn Objective<T>>,
    exact_gradient: Option<GradientFn<T>>,
    feasible_set: FeasibleSet<T>,
    unrelaxable: bool,
    meta: ProblemMeta<T>,
    transcript: Mutex<OracleTranscript<T>>,
}

impl<T: Real> fmt::Debug for Problem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.meta.name)
            .field("n", &self.n)
            .field("feasible_set", &self.feasible_set)
            .field("unrelaxable", &self.unrelaxable)
            .finish_non_exhaustive()
    }
}

impl<T: Real> Problem<T> {
    /// Unconstrained problem. The starting point fixes the dimension.
    pub fn new(name: impl Into<String>, x0: Vec<T>, objective: Arc<dyn Objective<T>>) -> Self {
        Self {
            n: x0.len(),
            objective,
            exact_gradient: None,
            feasible_set: FeasibleSet::AllSpace,
            unrelaxable: false,
            meta: ProblemMeta {
                name: name.into(),
                lipschitz: None,
                f_star: None,
                pl_constant: None,
                x0,
            },
            transcript: Mutex::new(OracleTranscript::default()),
        }
    }

    /// Convenience constructor from a closure.
    pub fn from_fn<F>(name: impl Into<String>, x0: Vec<T>, f: F) -> Self
    where
        F: Fn(&[T]) -> T + Send + Sync + 'static,
    {
        Self::new(name, x0, Arc::new(FnObjective(f)))
    }

    /// Restricts the problem to `set`, projecting the starting point onto it.
    pub fn with_feasible_set(mut self, set: FeasibleSet<T>) -> Result<Self> {
        set.validate()?;
        if let Some(dim) = set.dim() {
            if dim != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: dim,
                });
            }
        }
        self.meta.x0 = set.project_unchecked(&self.meta.x0);
        self.feasible_set = set;
        Ok(self)
    }

    /// Replaces the starting point, projecting it onto the feasible set.
    pub fn with_x0(mut self, x0: Vec<T>) -> Result<Self> {
        if x0.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x0.len(),
            });
        }
        self.meta.x0 = self.feasible_set.project_unchecked(&x0);
        Ok(self)
    }

    /// Marks the constraints as unrelaxable: the objective may then only be
    /// requested at feasible points.
    pub fn unrelaxable(mut self, unrelaxable: bool) -> Self {
        self.unrelaxable = unrelaxable;
        self
    }

    pub fn with_gradient<G>(mut self, grad: G) -> Self
    where
        G: Fn(&[T]) -> Vec<T> + Send + Sync + 'static,
    {
        self.exact_gradient = Some(Arc::new(grad));
        self
    }

    pub fn with_gradient_fn(mut self, grad: GradientFn<T>) -> Self {
        self.exact_gradient = Some(grad);
        self
    }

    pub fn with_lipschitz(mut self, l: T) -> Self {
        self.meta.lipschitz = Some(l);
        self
    }

    pub fn with_f_star(mut self, f_star: T) -> Self {
        self.meta.f_star = Some(f_star);
        self
    }

    pub fn with_pl_constant(mut self, mu: T) -> Self {
        self.meta.pl_constant = Some(mu);
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn meta(&self) -> &ProblemMeta<T> {
        &self.meta
    }

    pub fn x0(&self) -> &[T] {
        &self.meta.x0
    }

    pub fn feasible_set(&self) -> &FeasibleSet<T> {
        &self.feasible_set
    }

    pub fn is_unrelaxable(&self) -> bool {
        self.unrelaxable
    }

    pub fn objective_is_concurrent(&self) -> bool {
        self.objective.concurrent()
    }

    pub fn has_exact_gradient(&self) -> bool {
        self.exact_gradient.is_some()
    }

    /// Exact gradient for diagnostics.
    pub fn exact_gradient(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x)?;
        let grad = self
            .exact_gradient
            .as_ref()
            .ok_or_else(|| Error::MissingExactGradient(self.meta.name.clone()))?;
        Ok(grad(x))
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluates the objective and appends the call to the transcript.
    pub fn evaluate(&self, x: &[T]) -> Result<T> {
        self.check_dim(x)?;
        let feasible = self.feasible_set.contains(x);
        if self.unrelaxable && !feasible {
            return Err(Error::InfeasibleEvaluation {
                point: format!("{x:?}"),
            });
        }
        let outcome = self.objective.value(x);
        let value = *outcome.as_ref().unwrap_or(&T::nan());
        self.lock_transcript().entries.push(Evaluation {
            point: x.to_vec(),
            value,
            feasible,
        });
        Ok(outcome?)
    }

    fn lock_transcript(&self) -> MutexGuard<'_, OracleTranscript<T>> {
        self.transcript
            .lock()
            .unwrap_or_else(|poisoned| poisoned.into_inner())
    }

    /// Snapshot of the transcript so far.
    pub fn transcript(&self) -> OracleTranscript<T> {
        self.lock_transcript().clone()
    }

    pub fn evaluation_count(&self) -> usize {
        self.lock_transcript().count()
    }

    /// Transcript entries from index `start` on.
    pub fn evaluations_since(&self, start: usize) -> Vec<Evaluation<T>> {
        let guard = self.lock_transcript();
        guard.entries.get(start..).map(<[_]>::to_vec).unwrap_or_default()
    }

    /// Empties the transcript and returns its previous contents.
    pub fn take_transcript(&self) -> OracleTranscript<T> {
        std::mem::take(&mut *self.lock_transcript())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> Problem<f64> {
        Problem::from_fn("sphere", vec![0.0, 0.0], |x: &[f64]| {
            x.iter().map(|v| v * v).sum()
        })
    }

    #[test]
    fn evaluate_sphere_and_record() {
        let p = sphere();
        assert_eq!(p.evaluate(&[1.0, 2.0]).unwrap(), 5.0);
        let t = p.transcript();
        assert_eq!(t.count(), 1);
        assert_eq!(t.entries()[0].point, vec![1.0, 2.0]);
    }

    #[test]
    fn rosenbrock_at_standard_start() {
        let p = registry::rosenbrock::<f64>();
        let f = p.evaluate(&[-1.2, 1.0]).unwrap();
        assert!((f - 24.2).abs() < 1e-12);
    }

    #[test]
    fn unrelaxable_rejects_infeasible_point() {
        let p = sphere()
            .with_feasible_set(FeasibleSet::uniform_box(2, 0.0, 1.0).unwrap())
            .unwrap()
            .unrelaxable(true);
        assert!(matches!(
            p.evaluate(&[2.0, 0.0]),
            Err(Error::InfeasibleEvaluation { .. })
        ));
        assert_eq!(p.evaluation_count(), 0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(matches!(
            sphere().evaluate(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn starting_point_is_projected() {
        let p = Problem::from_fn("p", vec![-3.0, 30.0], |x: &[f64]| x[0])
            .with_feasible_set(FeasibleSet::uniform_box(2, 0.1, 20.0).unwrap())
            .unwrap();
        assert_eq!(p.x0(), &[0.1, 20.0]);
    }

    #[test]
    fn problem_is_send_and_sync() {
        fn assert_send_sync<S: Send + Sync>() {}
        assert_send_sync::<Problem<f64>>();
    }

    #[test]
    fn replacing_start_point_projects_it() {
        let p = Problem::from_fn("q", vec![0.0, 0.0], |x: &[f64]| x[0] + x[1])
            .with_feasible_set(FeasibleSet::uniform_box(2, 0.0, 1.0).unwrap())
            .unwrap()
            .with_x0(vec![2.0, 0.5])
            .unwrap();
        assert_eq!(p.x0(), &[1.0, 0.5]);
        assert!(p.with_x0(vec![1.0]).is_err());
    }
}
