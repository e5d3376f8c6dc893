//! Flat `key=value` configuration files and their merge with flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use trfds::{default_config, BoundMode, SolverConfig64, SubproblemSolver};

use crate::CliError;

pub const KNOWN_KEYS: [&str; 17] = [
    "epsilon",
    "sigma",
    "alpha",
    "delta0",
    "delta_max",
    "delta_stop",
    "budget",
    "max_evaluations",
    "mode",
    "subproblem",
    "parallel_fd",
    "seed",
    "noise_scale",
    "problem",
    "problems",
    "tolerances",
    "bounds",
];

/// Values read from a config file. Later duplicates win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileSettings {
    values: BTreeMap<String, String>,
}

impl FileSettings {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected key=value", i + 1)));
            };
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key `{key}`", i + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    /// The flag when given, else the file value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

/// Solver overrides shared by the subcommands.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverOverrides {
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub delta0: Option<f64>,
    pub delta_max: Option<f64>,
    pub delta_stop: Option<f64>,
    pub mode: Option<BoundMode>,
    pub subproblem: Option<SubproblemSolver>,
    pub parallel_fd: Option<bool>,
}

impl SolverOverrides {
    pub fn merged(&self, file: &FileSettings) -> Result<Self, CliError> {
        Ok(Self {
            epsilon: file.pick(self.epsilon, "epsilon")?,
            sigma: file.pick(self.sigma, "sigma")?,
            alpha: file.pick(self.alpha, "alpha")?,
            delta0: file.pick(self.delta0, "delta0")?,
            delta_max: file.pick(self.delta_max, "delta_max")?,
            delta_stop: file.pick(self.delta_stop, "delta_stop")?,
            mode: file.pick(self.mode, "mode")?,
            subproblem: file.pick(self.subproblem, "subproblem")?,
            parallel_fd: file.pick(self.parallel_fd, "parallel_fd")?,
        })
    }

    /// Defaults for dimension `n` with the overrides applied and validated.
    ///
    /// Changing `epsilon` or `sigma` moves `τ₀`; `Δ₀` and `Δmax` are then
    /// re-derived unless given explicitly.
    pub fn config(&self, n: usize) -> Result<SolverConfig64, CliError> {
        let mut c = default_config::<f64>(n);
        if let Some(v) = self.epsilon {
            c.epsilon = v;
            if self.sigma.is_none() {
                c.sigma = v / ((n as f64).sqrt() * f64::EPSILON.sqrt());
            }
        }
        if let Some(v) = self.sigma {
            c.sigma = v;
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        let floor = c.tau0(n) * (n as f64).sqrt();
        c.delta0 = self.delta0.unwrap_or_else(|| c.delta0.max(floor));
        c.delta_max = self.delta_max.unwrap_or_else(|| c.delta_max.max(c.delta0));
        if let Some(v) = self.delta_stop {
            c.delta_stop = v;
        }
        if let Some(v) = self.mode {
            c.mode = v;
        }
        if let Some(v) = self.subproblem {
            c.subproblem = v;
        }
        if let Some(v) = self.parallel_fd {
            c.parallel_fd = v;
        }
        c.validate(n).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(c)
    }
}

/// `lo,hi` for a uniform box.
pub fn parse_bounds(text: &str) -> Result<(f64, f64), CliError> {
    let parts = parse_list::<f64>(text)?;
    match parts.as_slice() {
        [lo, hi] if lo < hi => Ok((*lo, *hi)),
        _ => Err(CliError::Usage(format!("bounds must be `lo,hi` with lo < hi, got `{text}`"))),
    }
}

pub fn parse_list<T>(text: &str) -> Result<Vec<T>, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| CliError::Usage(format!("`{s}`: {e}"))))
        .collect()
}
