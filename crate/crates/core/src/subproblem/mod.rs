//! Approximate minimization of the quadratic model over the trust region
//! intersected with the (shifted) feasible set.
//!
//! Every solver here returns a [`TrialStep`] whose model decrease is at least
//! that of a (generalized) Cauchy step, which is the only property the outer
//! iteration relies on.

mod accel;
mod cauchy;
pub mod dykstra;
mod tcg;

pub use accel::{projected_accel, projected_accel_with, AccelOptions};
pub use cauchy::{cauchy_step, generalized_cauchy_step, GCP_ARMIJO, GCP_MAX_HALVINGS};
pub use tcg::truncated_cg;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, scale, Matrix};
use crate::problem::{project_ball, project_box, FeasibleSet};
use crate::scalar::Real;

use dykstra::{dykstra, DYKSTRA_MAX_ITER};

/// `m(d) = f0 + <g, d> + ½ <H d, d>`
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticModel<T> {
    pub f0: T,
    pub g: Vec<T>,
    pub h: Matrix<T>,
}

impl<T: Real> QuadraticModel<T> {
    /// Checks that `H` is square of matching size, symmetric and nonzero.
    pub fn new(f0: T, g: Vec<T>, h: Matrix<T>) -> Result<Self> {
        if h.dim() != g.len() {
            return Err(Error::DimensionMismatch {
                expected: g.len(),
                got: h.dim(),
            });
        }
        if !h.is_symmetric() {
            return Err(Error::InvalidConfig("model Hessian must be symmetric".into()));
        }
        if h.is_zero() {
            return Err(Error::InvalidConfig("model Hessian must be nonzero".into()));
        }
        Ok(Self { f0, g, h })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn value(&self, d: &[T]) -> T {
        self.f0 - self.decrease(d)
    }

    /// `m(0) − m(d)`
    pub fn decrease(&self, d: &[T]) -> T {
        -(dot(&self.g, d) + T::lit(0.5) * self.h.quad_form(d))
    }

    /// `∇m(d) = g + H d`
    pub fn gradient_at(&self, d: &[T]) -> Vec<T> {
        let mut hd = self.h.matvec(d);
        for (v, &gi) in hd.iter_mut().zip(&self.g) {
            *v += gi;
        }
        hd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Cauchy,
    GeneralizedCauchy,
    TruncatedCg,
    ProjectedAccel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStep<T> {
    pub d: Vec<T>,
    /// `m(0) − m(d)`
    pub model_decrease: T,
    pub kind: StepKind,
    /// Set when no feasible descent was found along the projected path
    /// (`d = 0`).
    pub degenerate: bool,
}

impl<T: Real> TrialStep<T> {
    pub(crate) fn new(model: &QuadraticModel<T>, d: Vec<T>, kind: StepKind) -> Self {
        let model_decrease = model.decrease(&d);
        Self {
            d,
            model_decrease,
            kind,
            degenerate: false,
        }
    }

    pub(crate) fn degenerate(n: usize, kind: StepKind) -> Self {
        Self {
            d: vec![T::zero(); n],
            model_decrease: T::zero(),
            kind,
            degenerate: true,
        }
    }
}

/// `m(0) − m(d) + 1e−10 ≥ κ η min{Δ, η / ‖H‖}`.
///
/// Diagnostic only; the solver never evaluates `η`.
pub fn decrease_certificate<T: Real>(step: &TrialStep<T>, eta: T, delta: T, norm_h: T, kappa: T) -> bool {
    let radius_term = if norm_h > T::zero() {
        delta.min(eta / norm_h)
    } else {
        delta
    };
    step.model_decrease + T::lit(1e-10) >= kappa * eta * radius_term
}

/// `C = {d : ‖d‖ ≤ Δ, x + d ∈ Ω}` for a feasible `x`.
#[derive(Debug, Clone)]
pub struct StepRegion<'a, T> {
    set: &'a FeasibleSet<T>,
    x: &'a [T],
    delta: T,
    dykstra_tol: T,
}

impl<'a, T: Real> StepRegion<'a, T> {
    pub fn new(set: &'a FeasibleSet<T>, x: &'a [T], delta: T) -> Self {
        // 1e−8 for regions of unit size or larger, tighter for smaller ones.
        let dykstra_tol = T::lit(1e-8) * delta.min(T::one());
        Self {
            set,
            x,
            delta,
            dykstra_tol,
        }
    }

    pub fn with_dykstra_tol(mut self, tol: T) -> Self {
        self.dykstra_tol = tol;
        self
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    fn project_radius(&self, d: &[T]) -> Vec<T> {
        let nd = norm(d);
        if nd <= self.delta {
            d.to_vec()
        } else {
            scale(d, self.delta / nd)
        }
    }

    /// Exact projection onto `Ω − x`.
    fn project_shifted(&self, d: &[T]) -> Vec<T> {
        match self.set {
            FeasibleSet::AllSpace => d.to_vec(),
            FeasibleSet::Box { lower, upper } => {
                let lo: Vec<T> = lower.iter().zip(self.x).map(|(&l, &xi)| l - xi).collect();
                let hi: Vec<T> = upper.iter().zip(self.x).map(|(&u, &xi)| u - xi).collect();
                project_box(d, &lo, &hi)
            }
            FeasibleSet::Ball { center, radius } => {
                let c: Vec<T> = center.iter().zip(self.x).map(|(&c, &xi)| c - xi).collect();
                project_ball(d, &c, *radius)
            }
        }
    }

    fn in_shifted(&self, d: &[T]) -> bool {
        match self.set {
            FeasibleSet::AllSpace => true,
            FeasibleSet::Box { lower, upper } => d
                .iter()
                .zip(self.x)
                .zip(lower.iter().zip(upper))
                .all(|((&di, &xi), (&l, &u))| l - xi <= di && di <= u - xi),
            FeasibleSet::Ball { center, radius } => {
                let off: Vec<T> = d
                    .iter()
                    .zip(self.x.iter().zip(center))
                    .map(|(&di, (&xi, &c))| di + xi - c)
                    .collect();
                norm(&off) <= *radius
            }
        }
    }

    /// Euclidean projection onto `C` (Dykstra when both pieces are active).
    pub fn project(&self, d: &[T]) -> Vec<T> {
        let in_ball = self.project_radius(d);
        if self.set.is_all_space() || self.in_shifted(&in_ball) {
            return in_ball;
        }
        let in_set = self.project_shifted(d);
        if norm(&in_set) <= self.delta {
            return in_set;
        }
        let out = dykstra(
            d,
            |v: &[T]| self.project_radius(v),
            |v: &[T]| self.project_shifted(v),
            self.dykstra_tol,
            DYKSTRA_MAX_ITER,
        );
        self.finalize(&out.point)
    }

    /// Forces exact membership: shifted-set projection, then radial pull
    /// towards the (feasible) origin.
    pub fn finalize(&self, d: &[T]) -> Vec<T> {
        let d = self.project_shifted(d);
        self.project_radius(&d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate_examples() {
        let step = |dec: f64| TrialStep {
            d: vec![0.0],
            model_decrease: dec,
            kind: StepKind::Cauchy,
            degenerate: false,
        };
        assert!(decrease_certificate(&step(0.5), 1.0, 1.0, 1.0, 0.5));
        assert!(!decrease_certificate(&step(0.2), 1.0, 1.0, 1.0, 0.5));
    }

    #[test]
    fn model_rejects_bad_hessians() {
        let g = vec![1.0, 0.0];
        assert!(QuadraticModel::new(0.0, g.clone(), Matrix::zeros(2)).is_err());
        let asym = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(QuadraticModel::new(0.0, g.clone(), asym).is_err());
        assert!(QuadraticModel::new(0.0, g, Matrix::identity(3)).is_err());
    }

    #[test]
    fn region_projection_matches_halfspace_case() {
        let set = FeasibleSet::bounds(vec![-10.0, -10.0], vec![0.5, 10.0]).unwrap();
        let x = [0.0f64, 0.0];
        let region = StepRegion::new(&set, &x, 1.0).with_dykstra_tol(1e-12);
        let p = region.project(&[2.0, 2.0]);
        assert!((p[0] - 0.5).abs() < 1e-6);
        assert!((p[1] - 0.75f64.sqrt()).abs() < 1e-6);
        assert!(norm(&p) <= 1.0);
        assert!(p[0] <= 0.5);
    }
}
