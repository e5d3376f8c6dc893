use crate::error::{Error, Result};
use crate::linalg::{dot, is_zero, norm, scale, sub};
use crate::problem::FeasibleSet;
use crate::scalar::Real;

use super::{QuadraticModel, StepKind, TrialStep};

/// Sufficient-decrease constant of the projected-path backtracking.
pub const GCP_ARMIJO: f64 = 0.1;
pub const GCP_MAX_HALVINGS: usize = 60;

/// Minimizer of the model along `−g` inside `‖d‖ ≤ Δ` (no other constraints).
pub fn cauchy_step<T: Real>(model: &QuadraticModel<T>, delta: T) -> Result<TrialStep<T>> {
    let gnorm = norm(&model.g);
    if gnorm.is_zero() {
        return Err(Error::ZeroGradient);
    }
    let curvature = model.h.quad_form(&model.g);
    let to_boundary = delta / gnorm;
    let t = if curvature > T::zero() {
        to_boundary.min(gnorm * gnorm / curvature)
    } else {
        to_boundary
    };
    Ok(TrialStep::new(model, scale(&model.g, -t), StepKind::Cauchy))
}

/// Backtracking along the projected-gradient path `P_Ω(x − t g) − x`,
/// truncated radially to the trust region.
///
/// Starts from `t₀ = Δ/‖g‖` and halves `t` until
/// `m(s) ≤ m(0) + 0.1 <g, s>`, for at most 60 halvings; the best decrease seen
/// is returned if the test never passes. When the path is pinned at `x` for
/// every tried `t` the step is `d = 0` with the degenerate flag set.
pub fn generalized_cauchy_step<T: Real>(
    model: &QuadraticModel<T>,
    delta: T,
    set: &FeasibleSet<T>,
    x: &[T],
) -> Result<TrialStep<T>> {
    let n = model.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let gnorm = norm(&model.g);
    if gnorm.is_zero() {
        return Err(Error::ZeroGradient);
    }
    let armijo = T::lit(GCP_ARMIJO);
    let mut t = delta / gnorm;
    let mut best: Option<TrialStep<T>> = None;
    for _ in 0..=GCP_MAX_HALVINGS {
        let trial: Vec<T> = x.iter().zip(&model.g).map(|(&xi, &gi)| xi - t * gi).collect();
        let mut s = sub(&set.project_unchecked(&trial), x);
        let ns = norm(&s);
        if ns > delta {
            s = scale(&s, delta / ns);
        }
        if !is_zero(&s) {
            let decrease = model.decrease(&s);
            let slope = dot(&model.g, &s);
            let accepted = -decrease <= armijo * slope;
            if best.as_ref().is_none_or(|b| decrease > b.model_decrease) {
                best = Some(TrialStep {
                    d: s,
                    model_decrease: decrease,
                    kind: StepKind::GeneralizedCauchy,
                    degenerate: false,
                });
            }
            if accepted {
                break;
            }
        }
        t *= T::lit(0.5);
    }
    Ok(match best {
        Some(step) if step.model_decrease > T::zero() => step,
        _ => TrialStep::degenerate(n, StepKind::GeneralizedCauchy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use approx::assert_relative_eq;

    fn model(g: Vec<f64>, h: Matrix<f64>) -> QuadraticModel<f64> {
        QuadraticModel::new(0.0, g, h).unwrap()
    }

    #[test]
    fn cauchy_interior_minimizer() {
        let m = model(vec![1.0, 0.0], Matrix::identity(2));
        let s = cauchy_step(&m, 2.0).unwrap();
        assert_eq!(s.d, vec![-1.0, 0.0]);
        assert_relative_eq!(s.model_decrease, 0.5);
    }

    #[test]
    fn cauchy_clipped_at_boundary() {
        let m = model(vec![1.0, 0.0], Matrix::identity(2));
        let s = cauchy_step(&m, 0.5).unwrap();
        assert_eq!(s.d, vec![-0.5, 0.0]);
        assert_relative_eq!(s.model_decrease, 0.375);
    }

    #[test]
    fn cauchy_negative_curvature_goes_to_boundary() {
        let m = model(vec![1.0, 0.0], Matrix::from_diagonal(&[-1.0, -1.0]));
        let s = cauchy_step(&m, 1.0).unwrap();
        assert_eq!(s.d, vec![-1.0, 0.0]);
        assert_relative_eq!(s.model_decrease, 1.5);
    }

    #[test]
    fn cauchy_zero_gradient_is_an_error() {
        let m = model(vec![0.0, 0.0], Matrix::identity(2));
        assert!(matches!(cauchy_step(&m, 1.0), Err(Error::ZeroGradient)));
    }

    #[test]
    fn gcp_unconstrained_matches_cauchy() {
        let m = model(vec![1.0, 0.0], Matrix::identity(2));
        let s = generalized_cauchy_step(&m, 2.0, &FeasibleSet::AllSpace, &[0.0, 0.0]).unwrap();
        assert_eq!(s.d, vec![-1.0, 0.0]);
        assert_eq!(s.d, cauchy_step(&m, 2.0).unwrap().d);
    }

    #[test]
    fn gcp_box_path_clipped_at_corner() {
        let set = FeasibleSet::uniform_box(2, 0.0, 1.0).unwrap();
        let m = model(vec![-1.0, -1.0], Matrix::identity(2));
        let s = generalized_cauchy_step(&m, 10.0, &set, &[0.0, 0.0]).unwrap();
        assert_eq!(s.d, vec![1.0, 1.0]);
        assert_relative_eq!(s.model_decrease, 1.0);
        assert!(!s.degenerate);
    }

    #[test]
    fn gcp_pinned_on_face_is_degenerate() {
        let set = FeasibleSet::uniform_box(2, 0.0, 1.0).unwrap();
        let m = model(vec![1.0, 0.0], Matrix::identity(2));
        let s = generalized_cauchy_step(&m, 1.0, &set, &[0.0, 0.5]).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.d, vec![0.0, 0.0]);
        assert_eq!(s.model_decrease, 0.0);
    }
}
