use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Matrix};
use crate::scalar::Real;

use super::config::SolverConfig;

/// Relative size below which a curvature pairing counts as zero.
pub const BFGS_SKIP_THRESHOLD: f64 = 1e-14;

/// Outcome class of one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IterationClass {
    /// Accepted step.
    S,
    /// Rejected, gradient kept.
    U1,
    /// Rejected, stepsize halved and gradient rebuilt.
    U2,
}

impl fmt::Display for IterationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IterationClass::S => "S",
            IterationClass::U1 => "U1",
            IterationClass::U2 => "U2",
        })
    }
}

/// `(f(x) − f(x + d)) / (m(0) − m(d))`; the model decrease must be positive.
pub fn rho<T: Real>(f_old: T, f_new: T, model_decrease: T) -> Result<T> {
    if !(model_decrease > T::zero()) {
        return Err(Error::ZeroModelDecrease(model_decrease.as_f64()));
    }
    Ok((f_old - f_new) / model_decrease)
}

/// Radius and stepsize after classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusUpdate<T> {
    pub class: IterationClass,
    pub delta: T,
    pub tau: T,
}

impl<T> RadiusUpdate<T> {
    pub fn accepted(&self) -> bool {
        self.class == IterationClass::S
    }

    /// Whether the next iteration needs a fresh gradient.
    pub fn rebuild_gradient(&self) -> bool {
        self.class != IterationClass::U1
    }
}

/// `ρ ≥ α`: `Δ ← min{2Δ, Δ_max}`. Otherwise `Δ ← Δ/2`, and `τ ← τ/2` unless
/// `τ√n ≤ Δ` still holds. `None` (no trial evaluated) is unsuccessful.
pub fn classify_and_update<T: Real>(
    rho: Option<T>,
    delta: T,
    tau: T,
    n: usize,
    config: &SolverConfig<T>,
) -> RadiusUpdate<T> {
    let two = T::lit(2.0);
    if rho.is_some_and(|r| r >= config.alpha) {
        return RadiusUpdate {
            class: IterationClass::S,
            delta: (two * delta).min(config.delta_max),
            tau,
        };
    }
    let delta = delta / two;
    if tau * T::from_count(n).sqrt() <= delta {
        RadiusUpdate {
            class: IterationClass::U1,
            delta,
            tau,
        }
    } else {
        RadiusUpdate {
            class: IterationClass::U2,
            delta,
            tau: tau / two,
        }
    }
}

/// Safeguarded BFGS: `H + yyᵀ/(sᵀy) − Hs sᵀH/(sᵀHs)`.
///
/// Returns `None` (keep `H`) when `|sᵀy| ≤ 1e−14 ‖s‖‖y‖` or
/// `|sᵀHs| ≤ 1e−14 ‖s‖‖Hs‖`. Negative curvature pairs are kept, so `H` may
/// become indefinite.
pub fn bfgs_update<T: Real>(h: &Matrix<T>, s: &[T], y: &[T]) -> Option<Matrix<T>> {
    let guard = T::lit(BFGS_SKIP_THRESHOLD);
    let sy = dot(s, y);
    if !(sy.abs() > guard * norm(s) * norm(y)) || !sy.is_finite() {
        return None;
    }
    let hs = h.matvec(s);
    let shs = dot(s, &hs);
    if !(shs.abs() > guard * norm(s) * norm(&hs)) || !shs.is_finite() {
        return None;
    }
    let mut next = h.clone();
    next.rank_one_update(T::one() / sy, y, y);
    next.rank_one_update(-T::one() / shs, &hs, &hs);
    next.symmetrize();
    if next.as_slice().iter().all(|v| v.is_finite()) && !next.is_zero() {
        Some(next)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::super::config::default_config;
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn rho_ratio() {
        assert_eq!(rho(10.0, 9.0, 2.0).unwrap(), 0.5);
        assert!(matches!(rho(1.0, 0.0, 0.0), Err(Error::ZeroModelDecrease(_))));
        assert!(rho(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn successful_doubles_radius() {
        let c = default_config::<f64>(4);
        let u = classify_and_update(Some(0.5), 0.4, 0.1, 4, &c);
        assert_eq!(u.class, IterationClass::S);
        assert_eq!(u.delta, 0.8);
        assert_eq!(u.tau, 0.1);
        let u = classify_and_update(Some(0.5), 800.0, 0.1, 4, &c);
        assert_eq!(u.delta, 1000.0);
    }

    #[test]
    fn unsuccessful_keeps_tau_when_compatible() {
        let c = default_config::<f64>(4);
        let u = classify_and_update(Some(-1.0), 0.4, 0.1, 4, &c);
        assert_eq!(u.class, IterationClass::U1);
        assert_eq!(u.delta, 0.2);
        assert_eq!(u.tau, 0.1);
        assert!(!u.rebuild_gradient());
    }

    #[test]
    fn unsuccessful_halves_tau_otherwise() {
        let c = default_config::<f64>(4);
        let u = classify_and_update(Some(-1.0), 0.3, 0.1, 4, &c);
        assert_eq!(u.class, IterationClass::U2);
        assert_eq!(u.delta, 0.15);
        assert_eq!(u.tau, 0.05);
        assert!(u.rebuild_gradient());
    }

    #[test]
    fn missing_ratio_is_unsuccessful() {
        let c = default_config::<f64>(1);
        let u = classify_and_update(None, 1.0, 1e-8, 1, &c);
        assert_eq!(u.class, IterationClass::U1);
        let u = classify_and_update(Some(f64::NAN), 1.0, 1e-8, 1, &c);
        assert_eq!(u.class, IterationClass::U1);
    }

    #[test]
    fn bfgs_secant_condition() {
        let h = Matrix::identity(2);
        let s = [1.0, 0.5];
        let y = [2.0, 0.3];
        let next = bfgs_update(&h, &s, &y).unwrap();
        let hs = next.matvec(&s);
        assert_relative_eq!(hs[0], y[0], epsilon = 1e-12);
        assert_relative_eq!(hs[1], y[1], epsilon = 1e-12);
        assert!(next.is_symmetric());
    }

    #[test]
    fn bfgs_forced_arithmetic() {
        let h = Matrix::identity(2);
        let next = bfgs_update(&h, &[1.0, 0.0], &[2.0, 0.0]).unwrap();
        assert_eq!(next, Matrix::from_diagonal(&[2.0, 1.0]));
        let fixed = bfgs_update(&h, &[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(fixed, h);
    }

    #[test]
    fn bfgs_skips_zero_pairing() {
        let h = Matrix::identity(2);
        assert!(bfgs_update(&h, &[1.0, 0.0], &[0.0, 1.0]).is_none());
        assert!(bfgs_update(&h, &[0.0, 0.0], &[1.0, 0.0]).is_none());
    }

    #[test]
    fn bfgs_accepts_negative_pairing() {
        let h = Matrix::identity(2);
        let next = bfgs_update(&h, &[1.0, 0.0], &[-1.0, 0.0]).unwrap();
        assert_eq!(next, Matrix::from_diagonal(&[-1.0, 1.0]));
    }

    proptest! {
        #[test]
        fn radius_invariant_preserved(
            logdelta in -10.0f64..3.0,
            ratio in -2.0f64..2.0,
            n in 1usize..50,
        ) {
            let c = default_config::<f64>(n);
            let delta = 10f64.powf(logdelta).min(c.delta_max);
            let tau = delta / (n as f64).sqrt();
            let u = classify_and_update(Some(ratio), delta, tau, n, &c);
            prop_assert!(u.tau * (n as f64).sqrt() <= u.delta * (1.0 + 1e-15));
            prop_assert!(u.delta <= c.delta_max);
            prop_assert!(u.tau <= tau);
        }

        #[test]
        fn bfgs_symmetric_and_secant(
            s in prop::collection::vec(-3.0f64..3.0, 3),
            y in prop::collection::vec(-3.0f64..3.0, 3),
        ) {
            let h = Matrix::from_diagonal(&[1.0, 2.0, 3.0]);
            if let Some(next) = bfgs_update(&h, &s, &y) {
                prop_assert!(next.is_symmetric());
                let hs = next.matvec(&s);
                let scale = next.max_abs() * norm(&s) + norm(&y);
                for (a, b) in hs.iter().zip(&y) {
                    prop_assert!((a - b).abs() <= 1e-9 * scale, "{:?} vs {:?}", hs, y);
                }
            }
        }
    }
}
