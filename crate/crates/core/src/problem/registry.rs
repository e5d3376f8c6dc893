//! Built-in test problems addressed by name.
//!
//! Names may carry a dimension suffix, e.g. `sphere:10`, for the families
//! that are defined in any dimension (`sphere`, `quadratic`, `nonconvex`).

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::problem::{FnObjective, Problem};
use crate::scalar::Real;

/// The least-squares subset of the Moré–Wild collection shipped here.
pub const MORE_WILD: [&str; 10] = [
    "linear_full_rank",
    "rosenbrock",
    "helical_valley",
    "powell_singular",
    "freudenstein_roth",
    "bard",
    "kowalik_osborne",
    "box3d",
    "jennrich_sampson",
    "brown_dennis",
];

pub const FAMILIES: [&str; 3] = ["sphere", "quadratic", "nonconvex"];

/// Every name accepted by [`build`] without a dimension suffix.
pub fn names() -> Vec<&'static str> {
    FAMILIES.iter().chain(MORE_WILD.iter()).copied().collect()
}

/// Builds a registered problem. `seed` only affects randomized families.
pub fn build<T: Real>(spec: &str, seed: u64) -> Result<Problem<T>> {
    let (name, dim) = match spec.split_once(':') {
        Some((name, d)) => {
            let n: usize = d
                .parse()
                .map_err(|_| Error::UnknownProblem(spec.to_string()))?;
            if n == 0 {
                return Err(Error::UnknownProblem(spec.to_string()));
            }
            (name, Some(n))
        }
        None => (spec, None),
    };
    match name {
        "sphere" => Ok(sphere(dim.unwrap_or(5))),
        "quadratic" => {
            let n = dim.unwrap_or(10);
            Ok(convex_quadratic(&geometric_spectrum(n, 1.0, 100.0), seed))
        }
        "nonconvex" => Ok(nonconvex(dim.unwrap_or(4))),
        _ if dim.is_some() => Err(Error::UnknownProblem(spec.to_string())),
        "rosenbrock" => Ok(rosenbrock()),
        other => more_wild(other),
    }
}

/// `lo, ..., hi` spaced geometrically, `n` entries.
pub fn geometric_spectrum(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn lit_vec<T: Real>(values: &[f64]) -> Vec<T> {
    values.iter().map(|&v| T::lit(v)).collect()
}

/// `f(x) = Σ x_i²`, started at the all-ones point.
pub fn sphere<T: Real>(n: usize) -> Problem<T> {
    Problem::from_fn(format!("sphere:{n}"), vec![T::one(); n], |x: &[T]| {
        dot(x, x)
    })
    .with_gradient(|x: &[T]| x.iter().map(|&v| v + v).collect())
    .with_lipschitz(T::lit(2.0))
    .with_f_star(T::zero())
    .with_pl_constant(T::lit(2.0))
}

/// `f(x) = ½ xᵀ A x` with `A = Qᵀ diag(spectrum) Q` for a seeded orthogonal `Q`.
///
/// Started at `x0 = (1, ..., 1)`; `L = max(spectrum)` and the PL constant is
/// `min(spectrum)`.
pub fn convex_quadratic<T: Real>(spectrum: &[f64], seed: u64) -> Problem<T> {
    let n = spectrum.len();
    let a = rotated_matrix(spectrum, seed);
    let hess: Matrix<T> = Matrix::from_row_major(n, lit_vec(a.as_slice()));
    let hess_grad = hess.clone();
    let l = spectrum.iter().cloned().fold(f64::MIN, f64::max);
    let mu = spectrum.iter().cloned().fold(f64::MAX, f64::min);
    let mut p = Problem::from_fn(format!("quadratic:{n}"), vec![T::one(); n], move |x: &[T]| {
        T::lit(0.5) * hess.quad_form(x)
    })
    .with_gradient(move |x: &[T]| hess_grad.matvec(x))
    .with_lipschitz(T::lit(l))
    .with_f_star(T::zero());
    if mu > 0.0 {
        p = p.with_pl_constant(T::lit(mu));
    }
    p
}

/// Symmetric matrix with the given eigenvalues, rotated by three seeded
/// Householder reflections.
pub fn rotated_matrix(spectrum: &[f64], seed: u64) -> Matrix<f64> {
    let n = spectrum.len();
    let mut a = Matrix::from_diagonal(spectrum);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..3 {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let vv = dot(&v, &v);
        if vv < 1e-12 {
            continue;
        }
        // A <- (I - 2vvᵀ/vᵀv) A (I - 2vvᵀ/vᵀv)
        let av = a.matvec(&v);
        let vav = dot(&v, &av);
        let beta = 2.0 / vv;
        a.rank_one_update(-beta, &v, &av);
        a.rank_one_update(-beta, &av, &v);
        a.rank_one_update(beta * beta * vav, &v, &v);
    }
    a.symmetrize();
    a
}

/// `f(x) = Σ (½x_i² + 2cos x_i) + ¼ Σ (x_i − x_{i+1})²`.
///
/// Nonconvex around the origin, bounded below, gradient Lipschitz with
/// `L = 5` (an upper bound: `1 + 2 + ½·4`).
pub fn nonconvex<T: Real>(n: usize) -> Problem<T> {
    let x0 = (0..n)
        .map(|i| if i % 2 == 0 { T::lit(0.5) } else { T::lit(-0.3) })
        .collect();
    Problem::from_fn(format!("nonconvex:{n}"), x0, |x: &[T]| {
        let two = T::lit(2.0);
        let quarter = T::lit(0.25);
        let mut f = T::zero();
        for (i, &xi) in x.iter().enumerate() {
            f += T::lit(0.5) * xi * xi + two * xi.cos();
            if i + 1 < x.len() {
                let d = xi - x[i + 1];
                f += quarter * d * d;
            }
        }
        f
    })
    .with_gradient(|x: &[T]| {
        let n = x.len();
        let half = T::lit(0.5);
        (0..n)
            .map(|i| {
                let mut g = x[i] - T::lit(2.0) * x[i].sin();
                if i + 1 < n {
                    g += half * (x[i] - x[i + 1]);
                }
                if i > 0 {
                    g += half * (x[i] - x[i - 1]);
                }
                g
            })
            .collect()
    })
    .with_lipschitz(T::lit(5.0))
}

/// `f(x) = 100(x₂ − x₁²)² + (1 − x₁)²` from `(−1.2, 1)`.
pub fn rosenbrock<T: Real>() -> Problem<T> {
    Problem::from_fn("rosenbrock", lit_vec(&[-1.2, 1.0]), |x: &[T]| {
        let a = x[1] - x[0] * x[0];
        let b = T::one() - x[0];
        T::lit(100.0) * a * a + b * b
    })
    .with_gradient(|x: &[T]| {
        let a = x[1] - x[0] * x[0];
        vec![
            T::lit(-400.0) * x[0] * a - T::lit(2.0) * (T::one() - x[0]),
            T::lit(200.0) * a,
        ]
    })
    .with_f_star(T::zero())
}

type Residuals<T> = fn(&[T]) -> Vec<T>;

fn least_squares<T: Real>(name: &str, x0: &[f64], residuals: Residuals<T>) -> Problem<T> {
    let objective = FnObjective(move |x: &[T]| residuals(x).into_iter().map(|r| r * r).sum());
    Problem::new(name, lit_vec(x0), Arc::new(objective))
}

/// One of the shipped Moré–Wild problems, `f(x) = ‖F(x)‖²`.
pub fn more_wild<T: Real>(name: &str) -> Result<Problem<T>> {
    let p = match name {
        "linear_full_rank" => least_squares(name, &[1.0; 9], linear_full_rank::<T>),
        "rosenbrock" => rosenbrock(),
        "helical_valley" => least_squares(name, &[-1.0, 0.0, 0.0], helical_valley::<T>),
        "powell_singular" => least_squares(name, &[3.0, -1.0, 0.0, 1.0], powell_singular::<T>),
        "freudenstein_roth" => least_squares(name, &[0.5, -2.0], freudenstein_roth::<T>),
        "bard" => least_squares(name, &[1.0, 1.0, 1.0], bard::<T>),
        "kowalik_osborne" => {
            least_squares(name, &[0.25, 0.39, 0.415, 0.39], kowalik_osborne::<T>)
        }
        "box3d" => least_squares(name, &[0.0, 10.0, 20.0], box3d::<T>),
        "jennrich_sampson" => least_squares(name, &[0.3, 0.4], jennrich_sampson::<T>),
        "brown_dennis" => least_squares(name, &[25.0, 5.0, -5.0, -1.0], brown_dennis::<T>),
        other => return Err(Error::UnknownProblem(other.to_string())),
    };
    Ok(p)
}

fn linear_full_rank<T: Real>(x: &[T]) -> Vec<T> {
    const M: usize = 45;
    let s = T::lit(2.0) / T::from_count(M) * x.iter().copied().sum::<T>();
    (0..M)
        .map(|i| {
            let base = -s - T::one();
            if i < x.len() {
                x[i] + base
            } else {
                base
            }
        })
        .collect()
}

fn helical_valley<T: Real>(x: &[T]) -> Vec<T> {
    let two_pi = T::lit(2.0) * T::PI();
    let theta = if x[0] > T::zero() {
        (x[1] / x[0]).atan() / two_pi
    } else if x[0] < T::zero() {
        (x[1] / x[0]).atan() / two_pi + T::lit(0.5)
    } else {
        T::lit(0.25) * x[1].signum()
    };
    let ten = T::lit(10.0);
    vec![
        ten * (x[2] - ten * theta),
        ten * ((x[0] * x[0] + x[1] * x[1]).sqrt() - T::one()),
        x[2],
    ]
}

fn powell_singular<T: Real>(x: &[T]) -> Vec<T> {
    let a = x[1] - T::lit(2.0) * x[2];
    let b = x[0] - x[3];
    vec![
        x[0] + T::lit(10.0) * x[1],
        T::lit(5.0).sqrt() * (x[2] - x[3]),
        a * a,
        T::lit(10.0).sqrt() * b * b,
    ]
}

fn freudenstein_roth<T: Real>(x: &[T]) -> Vec<T> {
    vec![
        T::lit(-13.0) + x[0] + ((T::lit(5.0) - x[1]) * x[1] - T::lit(2.0)) * x[1],
        T::lit(-29.0) + x[0] + ((x[1] + T::one()) * x[1] - T::lit(14.0)) * x[1],
    ]
}

const BARD_Y: [f64; 15] = [
    0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39, 0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39,
];

fn bard<T: Real>(x: &[T]) -> Vec<T> {
    BARD_Y
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let u = (i + 1) as f64;
            let v = 16.0 - u;
            let w = u.min(v);
            T::lit(y) - (x[0] + T::lit(u) / (T::lit(v) * x[1] + T::lit(w) * x[2]))
        })
        .collect()
}

const KOWALIK_Y: [f64; 11] = [
    0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246,
];
const KOWALIK_U: [f64; 11] = [
    4.0, 2.0, 1.0, 0.5, 0.25, 0.167, 0.125, 0.1, 0.0833, 0.0714, 0.0625,
];

fn kowalik_osborne<T: Real>(x: &[T]) -> Vec<T> {
    KOWALIK_Y
        .iter()
        .zip(KOWALIK_U)
        .map(|(&y, u)| {
            let u = T::lit(u);
            T::lit(y) - x[0] * (u * u + u * x[1]) / (u * u + u * x[2] + x[3])
        })
        .collect()
}

fn box3d<T: Real>(x: &[T]) -> Vec<T> {
    (1..=10)
        .map(|i| {
            let t = T::lit(0.1 * i as f64);
            (-t * x[0]).exp()
                - (-t * x[1]).exp()
                - x[2] * ((-t).exp() - (-T::lit(10.0) * t).exp())
        })
        .collect()
}

fn jennrich_sampson<T: Real>(x: &[T]) -> Vec<T> {
    (1..=10)
        .map(|i| {
            let fi = T::from_count(i);
            T::lit(2.0) + T::lit(2.0) * fi - ((fi * x[0]).exp() + (fi * x[1]).exp())
        })
        .collect()
}

fn brown_dennis<T: Real>(x: &[T]) -> Vec<T> {
    (1..=20)
        .map(|i| {
            let t = T::lit(i as f64 / 5.0);
            let a = x[0] + t * x[1] - t.exp();
            let b = x[2] + x[3] * t.sin() - t.cos();
            a * a + b * b
        })
        .collect()
}
