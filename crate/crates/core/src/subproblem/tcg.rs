use crate::error::{Error, Result};
use crate::linalg::{all_finite, axpy, dot, norm};
use crate::scalar::Real;

use super::{cauchy_step, QuadraticModel, StepKind, TrialStep};

/// `τ ≥ 0` with `‖z + τ p‖ = Δ`.
fn boundary_step<T: Real>(z: &[T], p: &[T], delta: T) -> T {
    let pp = dot(p, p);
    let zp = dot(z, p);
    let zz = dot(z, z);
    let disc = (zp * zp + pp * (delta * delta - zz)).max(T::zero());
    (-zp + disc.sqrt()) / pp
}

/// Steihaug–Toint truncated conjugate gradients on the unconstrained model.
///
/// Stops on the trust-region boundary, along a direction of nonpositive
/// curvature, or when `‖r‖ ≤ min{0.1, √‖g‖} ‖g‖`. Never returns less model
/// decrease than the Cauchy step.
pub fn truncated_cg<T: Real>(model: &QuadraticModel<T>, delta: T) -> Result<TrialStep<T>> {
    let n = model.dim();
    let gnorm = norm(&model.g);
    if gnorm.is_zero() {
        return Err(Error::ZeroGradient);
    }
    let cauchy = cauchy_step(model, delta)?;
    let tol = T::lit(0.1).min(gnorm.sqrt()) * gnorm;

    let mut z = vec![T::zero(); n];
    let mut r = model.g.clone();
    let mut p: Vec<T> = r.iter().map(|&v| -v).collect();
    let mut rr = dot(&r, &r);
    let max_iter = 2 * n.max(1);
    for _ in 0..max_iter {
        let hp = model.h.matvec(&p);
        let curvature = dot(&p, &hp);
        if !(curvature > T::zero()) {
            let tau = boundary_step(&z, &p, delta);
            axpy(tau, &p, &mut z);
            break;
        }
        let alpha = rr / curvature;
        let mut z_next = z.clone();
        axpy(alpha, &p, &mut z_next);
        if norm(&z_next) >= delta {
            let tau = boundary_step(&z, &p, delta);
            axpy(tau, &p, &mut z);
            break;
        }
        z = z_next;
        axpy(alpha, &hp, &mut r);
        let rr_next = dot(&r, &r);
        if rr_next.sqrt() <= tol {
            break;
        }
        let beta = rr_next / rr;
        rr = rr_next;
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = -ri + beta * *pi;
        }
    }
    if !all_finite(&z) {
        return Ok(cauchy);
    }
    let step = TrialStep::new(model, z, StepKind::TruncatedCg);
    Ok(if step.model_decrease >= cauchy.model_decrease {
        step
    } else {
        cauchy
    })
}
