use crate::error::{Error, Result};
use crate::linalg::{norm, sub};
use crate::scalar::Real;

/// Closed convex feasible region.
///
/// Build through [`FeasibleSet::ball`] or [`FeasibleSet::bounds`] so that the
/// shape invariants (`radius > 0`, `lower < upper`) are checked.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet<T> {
    AllSpace,
    Ball { center: Vec<T>, radius: T },
    Box { lower: Vec<T>, upper: Vec<T> },
}

impl<T: Real> FeasibleSet<T> {
    pub fn ball(center: Vec<T>, radius: T) -> Result<Self> {
        let set = FeasibleSet::Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn bounds(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        let set = FeasibleSet::Box { lower, upper };
        set.validate()?;
        Ok(set)
    }

    /// `[lower, upper]^n`
    pub fn uniform_box(n: usize, lower: T, upper: T) -> Result<Self> {
        Self::bounds(vec![lower; n], vec![upper; n])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FeasibleSet::AllSpace => Ok(()),
            FeasibleSet::Ball { center, radius } => {
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return Err(Error::InvalidSet(format!(
                        "ball radius must be positive and finite, got {radius}"
                    )));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidSet("ball center must be finite".into()));
                }
                Ok(())
            }
            FeasibleSet::Box { lower, upper } => {
                if lower.len() != upper.len() {
                    return Err(Error::DimensionMismatch {
                        expected: lower.len(),
                        got: upper.len(),
                    });
                }
                for (i, (&l, &u)) in lower.iter().zip(upper).enumerate() {
                    if l.is_nan() || u.is_nan() || !(l < u) {
                        return Err(Error::InvalidSet(format!(
                            "bounds must satisfy lower < upper, coordinate {i}: {l} >= {u}"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Dimension fixed by the set, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            FeasibleSet::AllSpace => None,
            FeasibleSet::Ball { center, .. } => Some(center.len()),
            FeasibleSet::Box { lower, .. } => Some(lower.len()),
        }
    }

    pub fn is_all_space(&self) -> bool {
        matches!(self, FeasibleSet::AllSpace)
    }

    pub fn is_box(&self) -> bool {
        matches!(self, FeasibleSet::Box { .. })
    }

    fn check_dim(&self, x: &[T]) -> Result<()> {
        match self.dim() {
            Some(n) if n != x.len() => Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Membership test. Boxes are checked exactly; balls allow a relative
    /// slack of a few ulps on the radius since radial scaling rounds.
    pub fn contains(&self, x: &[T]) -> bool {
        if self.check_dim(x).is_err() {
            return false;
        }
        match self {
            FeasibleSet::AllSpace => true,
            FeasibleSet::Ball { center, radius } => {
                norm(&sub(x, center)) <= *radius * (T::one() + T::lit(16.0) * T::epsilon())
            }
            FeasibleSet::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&xi, (&l, &u))| l <= xi && xi <= u),
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_dim(x)?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &[T]) -> Vec<T> {
        match self {
            FeasibleSet::AllSpace => x.to_vec(),
            FeasibleSet::Ball { center, radius } => project_ball(x, center, *radius),
            FeasibleSet::Box { lower, upper } => project_box(x, lower, upper),
        }
    }
}

/// Projection onto `{y : ‖y − center‖ ≤ radius}`.
pub fn project_ball<T: Real>(x: &[T], center: &[T], radius: T) -> Vec<T> {
    let offset = sub(x, center);
    let dist = norm(&offset);
    if dist <= radius {
        return x.to_vec();
    }
    let factor = radius / dist;
    center
        .iter()
        .zip(&offset)
        .map(|(&c, &o)| c + o * factor)
        .collect()
}

/// Componentwise clamp onto `[lower, upper]`.
pub fn project_box<T: Real>(x: &[T], lower: &[T], upper: &[T]) -> Vec<T> {
    x.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&xi, (&l, &u))| xi.max(l).min(u))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn box_projection_clamps() {
        let set = FeasibleSet::uniform_box(2, 0.0, 1.0).unwrap();
        assert_eq!(set.project(&[2.0, -1.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn ball_projection_scales_radially() {
        let set = FeasibleSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let p = set.project(&[3.0, 4.0]).unwrap();
        assert_relative_eq!(p[0], 0.6, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.8, epsilon = 1e-15);
    }

    #[test]
    fn all_space_is_identity() {
        let set = FeasibleSet::<f64>::AllSpace;
        assert_eq!(set.project(&[5.0, 5.0]).unwrap(), vec![5.0, 5.0]);
    }

    #[test]
    fn invalid_shapes_are_rejected() {
        assert!(FeasibleSet::bounds(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(FeasibleSet::ball(vec![0.0], 0.0).is_err());
        assert!(FeasibleSet::bounds(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn dimension_mismatch_on_project() {
        let set = FeasibleSet::uniform_box(2, 0.0, 1.0).unwrap();
        assert!(matches!(
            set.project(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    fn sets() -> Vec<FeasibleSet<f64>> {
        vec![
            FeasibleSet::AllSpace,
            FeasibleSet::ball(vec![0.5, -1.0, 2.0], 1.5).unwrap(),
            FeasibleSet::bounds(vec![-1.0, 0.0, 0.1], vec![1.0, 3.0, 20.0]).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn projection_is_idempotent_and_nonexpansive(
            x in prop::collection::vec(-50.0f64..50.0, 3),
            y in prop::collection::vec(-50.0f64..50.0, 3),
        ) {
            for set in sets() {
                let px = set.project(&x).unwrap();
                let py = set.project(&y).unwrap();
                prop_assert!(set.contains(&px));
                let ppx = set.project(&px).unwrap();
                for (a, b) in ppx.iter().zip(&px) {
                    prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
                }
                prop_assert!(norm(&sub(&px, &py)) <= norm(&sub(&x, &y)) * (1.0 + 1e-12) + 1e-12);
            }
        }
    }
}
