use std::fmt;
use std::io::Write;

use crate::error::Result;
use crate::scalar::Real;

use super::update::IterationClass;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    /// Not enough evaluations left for the next gradient or trial point.
    Budget,
    /// Trust-region radius fell to the stopping threshold.
    DeltaStop,
    /// Every finite difference vanished exactly.
    StationaryFlag,
    /// The oracle failed outside the first evaluation.
    OracleFailure(String),
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Budget => f.write_str("budget"),
            Termination::DeltaStop => f.write_str("delta_stop"),
            Termination::StationaryFlag => f.write_str("stationary"),
            Termination::OracleFailure(msg) => write!(f, "oracle_failure: {msg}"),
        }
    }
}

/// One outer iteration. `delta` and `tau` are the values the iteration
/// started with; `f` is the objective at the iterate it ended on.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog<T> {
    pub k: usize,
    pub class: IterationClass,
    pub delta: T,
    pub tau: T,
    /// `None` when no trial point was evaluated.
    pub rho: Option<T>,
    pub model_decrease: T,
    pub f: T,
    /// Evaluations spent up to the end of the iteration.
    pub evaluations: usize,
    pub gradient_rebuilt: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<T> {
    /// Best feasible value after each evaluation, `best_history[i]` after
    /// evaluation `i + 1`.
    pub best_history: Vec<T>,
    pub iterations: Vec<IterationLog<T>>,
    pub termination: Termination,
    pub evaluations: usize,
    pub x_best: Vec<T>,
    pub f_best: T,
    /// Final iterate of the trust-region sequence.
    pub x_final: Vec<T>,
    pub f_final: T,
    /// Iterations that started with `τ√n > Δ`.
    pub radius_violations: usize,
    /// Accepted steps that increased the objective.
    pub monotonicity_violations: usize,
}

impl<T: Real> RunRecord<T> {
    pub fn count(&self, class: IterationClass) -> usize {
        self.iterations.iter().filter(|it| it.class == class).count()
    }

    pub fn gradient_builds(&self) -> usize {
        self.iterations.iter().filter(|it| it.gradient_rebuilt).count()
    }

    /// Writes `eval,best_f`, one row per evaluation.
    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["eval", "best_f"])?;
        for (i, v) in self.best_history.iter().enumerate() {
            w.write_record([(i + 1).to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `k,class,delta,tau,rho,mdec,f`; an empty `rho` means no trial.
    pub fn write_iterations_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "class", "delta", "tau", "rho", "mdec", "f"])?;
        for it in &self.iterations {
            w.write_record([
                it.k.to_string(),
                it.class.to_string(),
                it.delta.to_string(),
                it.tau.to_string(),
                it.rho.map(|r| r.to_string()).unwrap_or_default(),
                it.model_decrease.to_string(),
                it.f.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> RunRecord<f64> {
        RunRecord {
            best_history: vec![3.0, 2.5, 2.5],
            iterations: vec![IterationLog {
                k: 0,
                class: IterationClass::U2,
                delta: 1.0,
                tau: 1e-8,
                rho: None,
                model_decrease: 0.0,
                f: 3.0,
                evaluations: 3,
                gradient_rebuilt: true,
            }],
            termination: Termination::Budget,
            evaluations: 3,
            x_best: vec![0.0],
            f_best: 2.5,
            x_final: vec![0.0],
            f_final: 3.0,
            radius_violations: 0,
            monotonicity_violations: 0,
        }
    }

    #[test]
    fn csv_headers_and_rows() {
        let r = record();
        let mut buf = Vec::new();
        r.write_history_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("eval,best_f"));
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().nth(2), Some("2,2.5"));

        let mut buf = Vec::new();
        r.write_iterations_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("k,class,delta,tau,rho,mdec,f"));
        assert_eq!(text.lines().nth(1), Some("0,U2,1,0.00000001,,0,3"));
    }

    #[test]
    fn class_counts() {
        let r = record();
        assert_eq!(r.count(IterationClass::U2), 1);
        assert_eq!(r.count(IterationClass::S), 0);
        assert_eq!(r.gradient_builds(), 1);
    }
}
