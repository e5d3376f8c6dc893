use crate::error::{Error, Result};
use crate::linalg::{norm, sub};
use crate::problem::FeasibleSet;
use crate::scalar::Real;

use super::{QuadraticModel, StepKind, StepRegion, TrialStep};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelOptions {
    pub max_iter: usize,
    /// Stop when an iterate moves less than `step_tol · Δ`.
    pub step_tol: f64,
    pub power_iterations: usize,
}

impl Default for AccelOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            step_tol: 1e-9,
            power_iterations: 30,
        }
    }
}

/// FISTA on the model over `{‖d‖ ≤ Δ} ∩ (Ω − x)` with Dykstra projections,
/// warm-started from `warm` and never worse than it.
///
/// The step length is `1/L` with `L` a power-iteration estimate of `‖H‖`.
/// Momentum is reset whenever the model value goes up.
pub fn projected_accel<T: Real>(
    model: &QuadraticModel<T>,
    delta: T,
    set: &FeasibleSet<T>,
    x: &[T],
    warm: &TrialStep<T>,
) -> Result<TrialStep<T>> {
    projected_accel_with(model, delta, set, x, warm, &AccelOptions::default())
}

pub fn projected_accel_with<T: Real>(
    model: &QuadraticModel<T>,
    delta: T,
    set: &FeasibleSet<T>,
    x: &[T],
    warm: &TrialStep<T>,
    options: &AccelOptions,
) -> Result<TrialStep<T>> {
    let n = model.dim();
    if x.len() != n || warm.d.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let region = StepRegion::new(set, x, delta);

    let radius = model.h.power_iteration_radius(options.power_iterations);
    let mut lipschitz = (radius * T::lit(1.05)).min(model.h.frobenius());
    if !(lipschitz > T::zero()) {
        let gnorm = norm(&model.g);
        lipschitz = if gnorm > T::zero() { gnorm / delta } else { T::one() };
    }
    let step = T::one() / lipschitz;
    let tol = T::lit(options.step_tol) * delta;

    let mut z = region.project(&warm.d);
    let mut mz = model.value(&z);
    let mut y = z.clone();
    let mut t = T::one();
    let mut restarted = false;
    for _ in 0..options.max_iter {
        let grad = model.gradient_at(&y);
        let trial: Vec<T> = y.iter().zip(&grad).map(|(&yi, &gi)| yi - step * gi).collect();
        let z_next = region.project(&trial);
        let m_next = model.value(&z_next);
        if !m_next.is_finite() {
            break;
        }
        if m_next > mz {
            if restarted {
                break;
            }
            restarted = true;
            y = z.clone();
            t = T::one();
            continue;
        }
        restarted = false;
        let t_next = (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt()) * T::lit(0.5);
        let moved = norm(&sub(&z_next, &z));
        let momentum = (t - T::one()) / t_next;
        y = z_next
            .iter()
            .zip(&z)
            .map(|(&a, &b)| a + momentum * (a - b))
            .collect();
        z = z_next;
        mz = m_next;
        t = t_next;
        if moved <= tol {
            break;
        }
    }

    let z = region.finalize(&z);
    let candidate = TrialStep::new(model, z, StepKind::ProjectedAccel);
    if candidate.model_decrease > warm.model_decrease && candidate.model_decrease > T::zero() {
        Ok(candidate)
    } else {
        Ok(warm.clone())
    }
}
