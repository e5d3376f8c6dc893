//! Parameter estimation for the Rosenzweig–MacArthur predator–prey model.
//!
//! `Y' = ζY(1 − Y/θ) − λYZ/(μ + Y)`, `Z' = νYZ/(μ + Y) − ξZ`, fitted to
//! synthetic noisy observations by weighted least squares under unrelaxable
//! bounds.

mod dopri;

pub use dopri::{integrate, integrate_fixed, OdeOptions};

use std::io::Write;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::driver::{default_config, solve, BoundMode, RunRecord, SolverConfig};
use crate::error::{Error, OracleError, Result};
use crate::problem::{FeasibleSet, Objective, Problem};
use crate::scalar::Real;

/// Ground truth `[ζ, θ, λ, μ, ν, ξ]`.
pub const TRUE_PARAMS: [f64; 6] = [0.723, 447.0, 2.88, 21.9, 5.54, 4.99];
pub const INITIAL_GUESS: [f64; 6] = [0.6, 400.0, 1.0, 10.0, 3.0, 2.0];
pub const LOWER: [f64; 6] = [0.001; 6];
pub const UPPER: [f64; 6] = [5.0, 1000.0, 10.0, 500.0, 10.0, 5.0];
pub const PREY0: f64 = 400.0;
pub const PREDATOR0: f64 = 20.0;
/// Observations at `t_i = 0.5 i`, `i = 0, …, 70`.
pub const SAMPLES: usize = 71;
pub const SAMPLE_SPACING: f64 = 0.5;
pub const NOISE_SCALE: f64 = 10.0;
/// Objective value reported when the integration fails.
pub const PENALTY: f64 = 1e12;
pub const BUDGET_EVALS: usize = 350;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredPreyParams<T> {
    pub zeta: T,
    pub theta: T,
    pub lambda: T,
    pub mu: T,
    pub nu: T,
    pub xi: T,
}

impl<T: Real> PredPreyParams<T> {
    pub fn from_slice(x: &[T]) -> Result<Self> {
        match *x {
            [zeta, theta, lambda, mu, nu, xi] => Ok(Self {
                zeta,
                theta,
                lambda,
                mu,
                nu,
                xi,
            }),
            _ => Err(Error::DimensionMismatch {
                expected: 6,
                got: x.len(),
            }),
        }
    }

    pub fn to_vec(&self) -> Vec<T> {
        vec![self.zeta, self.theta, self.lambda, self.mu, self.nu, self.xi]
    }

    pub fn truth() -> Self {
        Self::from_f64(&TRUE_PARAMS)
    }

    pub fn initial_guess() -> Self {
        Self::from_f64(&INITIAL_GUESS)
    }

    fn from_f64(v: &[f64; 6]) -> Self {
        let x: Vec<T> = v.iter().map(|&a| T::lit(a)).collect();
        Self::from_slice(&x).expect("six entries")
    }

    pub fn rhs(&self, y: &[T], dy: &mut [T]) {
        let (prey, pred) = (y[0], y[1]);
        let functional = prey * pred / (self.mu + prey);
        dy[0] = self.zeta * prey * (T::one() - prey / self.theta) - self.lambda * functional;
        dy[1] = self.nu * functional - self.xi * pred;
    }

    /// Coexistence equilibrium, when `ν > ξ`.
    pub fn equilibrium(&self) -> Option<(T, T)> {
        if !(self.nu > self.xi) {
            return None;
        }
        let prey = self.xi * self.mu / (self.nu - self.xi);
        let pred = self.zeta * (T::one() - prey / self.theta) * (self.mu + prey) / self.lambda;
        Some((prey, pred))
    }
}

/// The bound box `[ℓ, u]`.
pub fn bounds<T: Real>() -> FeasibleSet<T> {
    FeasibleSet::bounds(
        LOWER.iter().map(|&v| T::lit(v)).collect(),
        UPPER.iter().map(|&v| T::lit(v)).collect(),
    )
    .expect("valid box")
}

/// `t_i = 0.5 i` for `i < 71`.
pub fn sample_times<T: Real>() -> Vec<T> {
    (0..SAMPLES).map(|i| T::lit(SAMPLE_SPACING * i as f64)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub prey: Vec<T>,
    pub predator: Vec<T>,
}

pub fn integrate_model<T: Real>(params: &PredPreyParams<T>, prey0: T, predator0: T, times: &[T]) -> Result<Trajectory<T>> {
    if !(prey0 > T::zero() && predator0 > T::zero()) {
        return Err(Error::Integration("initial populations must be positive".into()));
    }
    let states = integrate(
        |_t, y: &[T], dy: &mut [T]| params.rhs(y, dy),
        T::zero(),
        &[prey0, predator0],
        times,
        &OdeOptions::default(),
    )?;
    if states.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Integration("non-finite state".into()));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        prey: states.iter().map(|s| s[0]).collect(),
        predator: states.iter().map(|s| s[1]).collect(),
    })
}

/// Noisy observations of both populations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub times: Vec<T>,
    pub prey: Vec<T>,
    pub predator: Vec<T>,
    pub noise_scale: T,
    pub seed: u64,
    /// Mean of the prey observations.
    pub prey_mean: T,
    pub predator_mean: T,
}

pub fn make_dataset<T: Real>(truth: &PredPreyParams<T>, seed: u64) -> Result<Dataset<T>> {
    make_dataset_with_noise(truth, seed, T::lit(NOISE_SCALE))
}

/// Integrates at `truth` and adds `noise_scale · N(0, 1)` to every
/// observation. Prey and predator draws alternate per sample from a
/// ChaCha8 stream seeded with `seed`.
pub fn make_dataset_with_noise<T: Real>(truth: &PredPreyParams<T>, seed: u64, noise_scale: T) -> Result<Dataset<T>> {
    let times = sample_times::<T>();
    let clean = integrate_model(truth, T::lit(PREY0), T::lit(PREDATOR0), &times)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prey = Vec::with_capacity(SAMPLES);
    let mut predator = Vec::with_capacity(SAMPLES);
    for i in 0..SAMPLES {
        let ey: f64 = StandardNormal.sample(&mut rng);
        let ez: f64 = StandardNormal.sample(&mut rng);
        prey.push(clean.prey[i] + noise_scale * T::lit(ey));
        predator.push(clean.predator[i] + noise_scale * T::lit(ez));
    }
    let count = T::from_count(SAMPLES);
    let prey_mean = prey.iter().copied().sum::<T>() / count;
    let predator_mean = predator.iter().copied().sum::<T>() / count;
    Ok(Dataset {
        times,
        prey,
        predator,
        noise_scale,
        seed,
        prey_mean,
        predator_mean,
    })
}

impl<T: Real> Dataset<T> {
    /// Writes `t,Y,Z`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "Y", "Z"])?;
        for i in 0..self.times.len() {
            w.write_record([self.times[i].to_string(), self.prey[i].to_string(), self.predator[i].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `Σ(Y − Ỹ)²/Ȳ² + Σ(Z − Z̃)²/Z̄²`, or the penalty when integration fails.
pub fn objective<T: Real>(data: &Dataset<T>, x: &[T]) -> T {
    let Ok(params) = PredPreyParams::from_slice(x) else {
        return T::lit(PENALTY);
    };
    match integrate_model(&params, T::lit(PREY0), T::lit(PREDATOR0), &data.times) {
        Ok(traj) => {
            let sq = |model: &[T], obs: &[T]| -> T {
                model.iter().zip(obs).map(|(&m, &o)| (m - o) * (m - o)).sum()
            };
            let value = sq(&traj.prey, &data.prey) / (data.prey_mean * data.prey_mean)
                + sq(&traj.predator, &data.predator) / (data.predator_mean * data.predator_mean);
            if value.is_finite() {
                value
            } else {
                T::lit(PENALTY)
            }
        }
        Err(_) => T::lit(PENALTY),
    }
}

struct CalibrationObjective<T> {
    data: Arc<Dataset<T>>,
}

impl<T: Real> Objective<T> for CalibrationObjective<T> {
    fn value(&self, x: &[T]) -> Result<T, OracleError> {
        Ok(objective(&self.data, x))
    }

    fn concurrent(&self) -> bool {
        true
    }
}

/// The calibration problem with unrelaxable bounds.
pub fn calibration_problem<T: Real>(data: Arc<Dataset<T>>, x0: &[T], set: FeasibleSet<T>) -> Result<Problem<T>> {
    if !set.contains(x0) {
        return Err(Error::InvalidConfig("x0 must lie within the bounds".into()));
    }
    Ok(Problem::new("predator_prey", x0.to_vec(), Arc::new(CalibrationObjective { data }))
        .with_feasible_set(set)?
        .unrelaxable(true))
}

/// Default solver parameters in unrelaxable mode, capped at `budget` evaluations.
pub fn calibration_config<T: Real>(budget: usize) -> SolverConfig<T> {
    let mut config = default_config(6);
    config.mode = BoundMode::UnrelaxableBox;
    config.max_evaluations = Some(budget);
    config
}

#[derive(Debug, Clone)]
pub struct Calibration<T> {
    pub record: RunRecord<T>,
    pub params: PredPreyParams<T>,
    pub fit: Trajectory<T>,
}

impl<T: Real> Calibration<T> {
    /// Writes `t,Y_fit,Z_fit,Y_obs,Z_obs`.
    pub fn write_fit_csv<W: Write>(&self, data: &Dataset<T>, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "Y_fit", "Z_fit", "Y_obs", "Z_obs"])?;
        for i in 0..self.fit.times.len() {
            w.write_record([
                self.fit.times[i].to_string(),
                self.fit.prey[i].to_string(),
                self.fit.predator[i].to_string(),
                data.prey[i].to_string(),
                data.predator[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn calibrate<T: Real>(data: &Dataset<T>, x0: &[T], set: FeasibleSet<T>, budget: usize) -> Result<Calibration<T>> {
    calibrate_with(data, x0, set, &calibration_config(budget))
}

pub fn calibrate_with<T: Real>(
    data: &Dataset<T>,
    x0: &[T],
    set: FeasibleSet<T>,
    config: &SolverConfig<T>,
) -> Result<Calibration<T>> {
    let problem = calibration_problem(Arc::new(data.clone()), x0, set)?;
    let record = solve(&problem, config)?;
    let params = PredPreyParams::from_slice(&record.x_best)?;
    let fit = integrate_model(&params, T::lit(PREY0), T::lit(PREDATOR0), &data.times)?;
    Ok(Calibration { record, params, fit })
}
