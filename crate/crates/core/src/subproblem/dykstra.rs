//! Dykstra's alternating projection onto the intersection of two closed
//! convex sets.

use crate::linalg::{norm, sub};
use crate::scalar::Real;

/// Default iteration cap; exceeding it is logged, not treated as an error.
pub const DYKSTRA_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DykstraOutcome<T> {
    /// Last iterate; it always lies in the second set.
    pub point: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Projects `z` onto `A ∩ B` given the individual projections.
///
/// Stops once successive iterates move by at most `tol` in Euclidean norm.
pub fn dykstra<T, PA, PB>(z: &[T], proj_a: PA, proj_b: PB, tol: T, max_iter: usize) -> DykstraOutcome<T>
where
    T: Real,
    PA: Fn(&[T]) -> Vec<T>,
    PB: Fn(&[T]) -> Vec<T>,
{
    let n = z.len();
    let mut x = z.to_vec();
    let mut p = vec![T::zero(); n];
    let mut q = vec![T::zero(); n];
    for it in 1..=max_iter {
        let xp: Vec<T> = x.iter().zip(&p).map(|(&a, &b)| a + b).collect();
        let y = proj_a(&xp);
        p = sub(&xp, &y);
        let yq: Vec<T> = y.iter().zip(&q).map(|(&a, &b)| a + b).collect();
        let x_next = proj_b(&yq);
        q = sub(&yq, &x_next);
        let change = norm(&sub(&x_next, &x));
        x = x_next;
        if change <= tol {
            return DykstraOutcome {
                point: x,
                iterations: it,
                converged: true,
            };
        }
    }
    log::warn!("Dykstra projection hit the {max_iter}-iteration cap");
    DykstraOutcome {
        point: x,
        iterations: max_iter,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::project_ball;
    use approx::assert_relative_eq;

    #[test]
    fn ball_and_halfspace() {
        // KKT by hand: the answer sits on both the unit circle and d₁ = 0.5.
        let out = dykstra(
            &[2.0, 2.0],
            |v: &[f64]| project_ball(v, &[0.0, 0.0], 1.0),
            |v: &[f64]| vec![v[0].min(0.5), v[1]],
            1e-12,
            DYKSTRA_MAX_ITER,
        );
        assert!(out.converged);
        assert_relative_eq!(out.point[0], 0.5, epsilon = 1e-6);
        assert_relative_eq!(out.point[1], 0.75f64.sqrt(), epsilon = 1e-6);
    }

    #[test]
    fn point_already_inside_is_fixed() {
        let out = dykstra(
            &[0.1, 0.2],
            |v: &[f64]| project_ball(v, &[0.0, 0.0], 1.0),
            |v: &[f64]| v.to_vec(),
            1e-12,
            10,
        );
        assert_eq!(out.point, vec![0.1, 0.2]);
        assert_eq!(out.iterations, 1);
    }
}
