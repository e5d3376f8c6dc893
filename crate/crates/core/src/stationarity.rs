//! Stationarity measures for diagnostics.
//!
//! `η_r(x) = −(1/r) min{⟨g, s⟩ : x + s ∈ Ω, ‖s‖ ≤ r}` with an approximate
//! gradient `g`, and `ψ_r` the same quantity with the exact gradient. The
//! solver never calls into this module.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::problem::{FeasibleSet, Problem};
use crate::scalar::Real;
use crate::subproblem::StepRegion;

pub const ETA_MAX_ITER: usize = 10_000;
/// Objective stagnation tolerance, relative to `r ‖g‖`.
pub const ETA_STAGNATION_TOL: f64 = 1e-10;

/// Measures at one point. `psi`, `gap` and `bound_ok` need the exact
/// gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityReport<T> {
    pub r: T,
    pub eta: T,
    pub psi: Option<T>,
    /// `|ψ − η|`
    pub gap: Option<T>,
    /// `(L/2) τ √n`
    pub bound: Option<T>,
    pub bound_ok: Option<bool>,
}

impl<T: Real> fmt::Display for StationarityReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "r={}", self.r)?;
        writeln!(f, "eta={}", self.eta)?;
        if let Some(psi) = self.psi {
            writeln!(f, "psi={psi}")?;
        }
        if let Some(gap) = self.gap {
            writeln!(f, "gap={gap}")?;
        }
        if let Some(bound) = self.bound {
            writeln!(f, "bound={bound}")?;
        }
        if let Some(ok) = self.bound_ok {
            writeln!(f, "bound_ok={ok}")?;
        }
        Ok(())
    }
}

/// `η_r(x)` for a feasible `x`.
///
/// Closed form `‖g‖` without constraints; otherwise projected gradient with
/// step `r/‖g‖` on `{‖s‖ ≤ r} ∩ (Ω − x)` until the linear objective stops
/// decreasing.
pub fn eta_measure<T: Real>(g: &[T], x: &[T], set: &FeasibleSet<T>, r: T) -> T {
    let gnorm = norm(g);
    if set.is_all_space() || gnorm.is_zero() {
        return gnorm;
    }
    let region = StepRegion::new(set, x, r).with_dykstra_tol(T::lit(1e-12) * r);
    let step = r / gnorm;
    let tol = T::lit(ETA_STAGNATION_TOL) * r * gnorm;
    let mut s = vec![T::zero(); g.len()];
    let mut value = T::zero();
    for _ in 0..ETA_MAX_ITER {
        let trial: Vec<T> = s.iter().zip(g).map(|(&si, &gi)| si - step * gi).collect();
        let next = region.project(&trial);
        let next_value = dot(g, &next);
        let stalled = value - next_value <= tol;
        if next_value < value {
            s = next;
            value = next_value;
        }
        if stalled {
            break;
        }
    }
    let s = region.finalize(&s);
    (-dot(g, &s) / r).max(T::zero())
}

/// `ψ_r(x)` from the problem's exact gradient.
pub fn psi_measure<T: Real>(problem: &Problem<T>, x: &[T], r: T) -> Result<T> {
    let grad = problem.exact_gradient(x)?;
    Ok(eta_measure(&grad, x, problem.feasible_set(), r))
}

/// `η_r` only.
pub fn eta_report<T: Real>(g: &[T], x: &[T], set: &FeasibleSet<T>, r: T) -> StationarityReport<T> {
    StationarityReport {
        r,
        eta: eta_measure(g, x, set, r),
        psi: None,
        gap: None,
        bound: None,
        bound_ok: None,
    }
}

/// `|ψ_r − η_r|` checked against `(L/2) τ √n + 1e−10`.
pub fn measure_gap<T: Real>(
    problem: &Problem<T>,
    x: &[T],
    g: &[T],
    r: T,
    tau: T,
    lipschitz: T,
) -> Result<StationarityReport<T>> {
    if g.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            got: g.len(),
        });
    }
    let psi = psi_measure(problem, x, r)?;
    let eta = eta_measure(g, x, problem.feasible_set(), r);
    let gap = (psi - eta).abs();
    let bound = lipschitz * T::lit(0.5) * tau * T::from_count(g.len()).sqrt();
    Ok(StationarityReport {
        r,
        eta,
        psi: Some(psi),
        gap: Some(gap),
        bound: Some(bound),
        bound_ok: Some(gap <= bound + T::lit(1e-10)),
    })
}

/// Largest `t ∈ [0, r]` with `x + t u ∈ Ω`, for a unit `u` and feasible `x`.
fn ray_extent<T: Real>(set: &FeasibleSet<T>, x: &[T], u: &[T], r: T) -> T {
    match set {
        FeasibleSet::AllSpace => r,
        FeasibleSet::Box { lower, upper } => {
            let mut t = r;
            for i in 0..x.len() {
                if u[i] > T::zero() {
                    t = t.min((upper[i] - x[i]) / u[i]);
                } else if u[i] < T::zero() {
                    t = t.min((lower[i] - x[i]) / u[i]);
                }
            }
            t.max(T::zero())
        }
        FeasibleSet::Ball { center, radius } => {
            let c: Vec<T> = center.iter().zip(x).map(|(&ci, &xi)| ci - xi).collect();
            let uc = dot(u, &c);
            let disc = (uc * uc - dot(&c, &c) + *radius * *radius).max(T::zero());
            (uc + disc.sqrt()).clamp(T::zero(), r)
        }
    }
}

fn in_region<T: Real>(set: &FeasibleSet<T>, x: &[T], s: &[T], r: T) -> bool {
    if norm(s) > r {
        return false;
    }
    let p: Vec<T> = x.iter().zip(s).map(|(&xi, &si)| xi + si).collect();
    set.contains(&p)
}

/// Brute-force `η_r` for `n ≤ 3`.
///
/// Minimizes over a lattice of pitch `r/500` (2-D) or `r/60` (3-D), the box
/// vertices inside the ball, and boundary points reached along `2²⁰` (2-D)
/// or `400 × 800` (3-D) evenly spaced rays from `x`. In 1-D the two
/// endpoints are exact.
pub fn grid_eta<T: Real>(g: &[T], x: &[T], set: &FeasibleSet<T>, r: T) -> Result<T> {
    let n = g.len();
    let mut best = T::zero();
    let mut consider = |s: &[T]| {
        let v = dot(g, s);
        if v < best {
            best = v;
        }
    };
    let rf = r.as_f64();
    match n {
        1 => {
            for dir in [T::one(), -T::one()] {
                let t = ray_extent(set, x, &[dir], r);
                consider(&[dir * t]);
            }
        }
        2 => {
            let k = 500i64;
            for i in -k..=k {
                for j in -k..=k {
                    let s = [T::lit(rf * i as f64 / k as f64), T::lit(rf * j as f64 / k as f64)];
                    if in_region(set, x, &s, r) {
                        consider(&s);
                    }
                }
            }
            let rays = 1usize << 20;
            for m in 0..rays {
                let a = std::f64::consts::TAU * m as f64 / rays as f64;
                let u = [T::lit(a.cos()), T::lit(a.sin())];
                let t = ray_extent(set, x, &u, r);
                consider(&[u[0] * t, u[1] * t]);
            }
        }
        3 => {
            let k = 60i64;
            for i in -k..=k {
                for j in -k..=k {
                    for l in -k..=k {
                        let s = [
                            T::lit(rf * i as f64 / k as f64),
                            T::lit(rf * j as f64 / k as f64),
                            T::lit(rf * l as f64 / k as f64),
                        ];
                        if in_region(set, x, &s, r) {
                            consider(&s);
                        }
                    }
                }
            }
            let (na, nb) = (400usize, 800usize);
            for a in 0..=na {
                let theta = std::f64::consts::PI * a as f64 / na as f64;
                for b in 0..nb {
                    let phi = std::f64::consts::TAU * b as f64 / nb as f64;
                    let u = [
                        T::lit(theta.sin() * phi.cos()),
                        T::lit(theta.sin() * phi.sin()),
                        T::lit(theta.cos()),
                    ];
                    let t = ray_extent(set, x, &u, r);
                    consider(&[u[0] * t, u[1] * t, u[2] * t]);
                }
            }
        }
        _ => {
            return Err(Error::InvalidConfig(format!(
                "brute-force eta supports n <= 3, got {n}"
            )))
        }
    }
    if let FeasibleSet::Box { lower, upper } = set {
        for mask in 0..(1usize << n) {
            let s: Vec<T> = (0..n)
                .map(|i| if mask >> i & 1 == 1 { upper[i] - x[i] } else { lower[i] - x[i] })
                .collect();
            if norm(&s) <= r {
                consider(&s);
            }
        }
    }
    Ok((-best / r).max(T::zero()))
}
