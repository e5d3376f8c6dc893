use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::SuiteEntry;

pub const DEFAULT_TOLERANCES: [f64; 4] = [1e-1, 1e-3, 1e-5, 1e-7];

/// A run solves its problem at the first evaluation whose best-so-far value
/// satisfies `f0 − f ≥ (1 − tolerance)(f0 − f_best)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceTest {
    pub tolerance: f64,
}

impl ConvergenceTest {
    pub fn new(tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must lie in (0, 1), got {tolerance}"
            )));
        }
        Ok(Self { tolerance })
    }

    pub fn passes(&self, f0: f64, f: f64, f_best: f64) -> bool {
        f0 - f >= (1.0 - self.tolerance) * (f0 - f_best)
    }

    /// 1-based evaluation count at which `history` first passes.
    pub fn first_solved(&self, history: &[f64], f_best: f64) -> Option<usize> {
        let f0 = *history.first()?;
        history
            .iter()
            .position(|&f| f.is_finite() && self.passes(f0, f, f_best))
            .map(|i| i + 1)
    }
}

/// Step functions of the fraction of problems solved against the budget in
/// simplex gradients. `fractions[s][j]` holds on `[alphas[j], alphas[j+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataProfile {
    pub alphas: Vec<f64>,
    pub solvers: Vec<String>,
    pub fractions: Vec<Vec<f64>>,
}

impl DataProfile {
    /// Fraction solved by `solver` within budget `alpha`.
    pub fn value(&self, solver: usize, alpha: f64) -> f64 {
        let idx = self.alphas.partition_point(|&a| a <= alpha);
        if idx == 0 {
            0.0
        } else {
            self.fractions[solver][idx - 1]
        }
    }

    pub fn solver_index(&self, name: &str) -> Option<usize> {
        self.solvers.iter().position(|s| s == name)
    }
}

/// Builds the profile from suite entries.
///
/// `f_best` and `f0` are taken per problem across every successful entry.
/// Breakpoints are `0`, every solve time `t/(n+1)` and the largest budget
/// used. Failed runs count as unsolved.
pub fn data_profile(entries: &[SuiteEntry], test: ConvergenceTest) -> Result<DataProfile> {
    if entries.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut solvers: Vec<String> = Vec::new();
    for e in entries {
        if !solvers.contains(&e.solver) {
            solvers.push(e.solver.clone());
        }
    }
    let mut per_problem: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for e in entries.iter().filter(|e| e.error.is_none()) {
        let (Some(f0), Some(fb)) = (e.f0(), e.f_best()) else {
            continue;
        };
        let slot = per_problem.entry(&e.problem).or_insert((f0, fb));
        slot.1 = slot.1.min(fb);
    }
    if per_problem.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let count = per_problem.len() as f64;

    let mut solve_times: Vec<Vec<f64>> = vec![Vec::new(); solvers.len()];
    let mut horizon: f64 = 0.0;
    for e in entries.iter().filter(|e| e.error.is_none()) {
        let Some(&(_, f_best)) = per_problem.get(e.problem.as_str()) else {
            continue;
        };
        let unit = (e.n + 1) as f64;
        horizon = horizon.max(e.history.len() as f64 / unit);
        if let Some(t) = test.first_solved(&e.history, f_best) {
            let s = solvers.iter().position(|s| *s == e.solver).expect("solver listed");
            solve_times[s].push(t as f64 / unit);
        }
    }
    let mut alphas: Vec<f64> = std::iter::once(0.0)
        .chain(solve_times.iter().flatten().copied())
        .chain(std::iter::once(horizon))
        .collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let fractions = solve_times
        .iter()
        .map(|times| {
            alphas
                .iter()
                .map(|&a| times.iter().filter(|&&t| t <= a).count() as f64 / count)
                .collect()
        })
        .collect();
    Ok(DataProfile {
        alphas,
        solvers,
        fractions,
    })
}

/// Writes `alpha,solver,fraction`, solver-major.
pub fn write_profile_csv<W: Write>(profile: &DataProfile, out: W) -> Result<()> {
    check_nonempty(profile)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "solver", "fraction"])?;
    for (s, name) in profile.solvers.iter().enumerate() {
        for (a, f) in profile.alphas.iter().zip(&profile.fractions[s]) {
            w.write_record([a.to_string(), name.clone(), f.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn parse_profile_csv<R: Read>(input: R) -> Result<DataProfile> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["alpha", "solver", "fraction"] {
        return Err(Error::Parse(format!("unexpected profile header {headers:?}")));
    }
    let mut solvers: Vec<String> = Vec::new();
    let mut alphas: Vec<Vec<f64>> = Vec::new();
    let mut fractions: Vec<Vec<f64>> = Vec::new();
    for row in reader.records() {
        let row = row?;
        let parse = |i: usize| -> Result<f64> {
            row[i]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("`{}`: {e}", &row[i])))
        };
        let name = row[1].to_string();
        let idx = match solvers.iter().position(|s| *s == name) {
            Some(i) => i,
            None => {
                solvers.push(name);
                alphas.push(Vec::new());
                fractions.push(Vec::new());
                solvers.len() - 1
            }
        };
        alphas[idx].push(parse(0)?);
        fractions[idx].push(parse(2)?);
    }
    let Some(first) = alphas.first().cloned() else {
        return Err(Error::EmptyRecords);
    };
    if alphas.iter().any(|a| *a != first) {
        return Err(Error::Parse("solvers use different alpha grids".into()));
    }
    Ok(DataProfile {
        alphas: first,
        solvers,
        fractions,
    })
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Standalone SVG with one step `<path>` per solver.
pub fn write_profile_svg<W: Write>(profile: &DataProfile, title: &str, mut out: W) -> Result<()> {
    check_nonempty(profile)?;
    let alpha_max = profile.alphas.last().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let px = |a: f64| MARGIN + (WIDTH - 2.0 * MARGIN) * a / alpha_max;
    let py = |f: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * f;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#,
        y0 = py(0.0),
        x1 = px(alpha_max)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{MARGIN}" y1="{y0}" x2="{MARGIN}" y2="{y1}" stroke="black"/>"#,
        y0 = py(0.0),
        y1 = py(1.0)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        escape(title),
        x = WIDTH / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{x}" y="{y}" text-anchor="middle" font-size="12">simplex gradients (max {alpha_max:.1})</text>"#,
        x = WIDTH / 2.0,
        y = HEIGHT - 12.0
    );
    for (s, name) in profile.solvers.iter().enumerate() {
        let color = COLORS[s % COLORS.len()];
        let mut d = format!("M {:.3} {:.3}", px(profile.alphas[0]), py(profile.fractions[s][0]));
        for j in 1..profile.alphas.len() {
            let _ = write!(d, " H {:.3} V {:.3}", px(profile.alphas[j]), py(profile.fractions[s][j]));
        }
        let _ = writeln!(
            svg,
            r#"<path class="step" d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x}" y="{y}" font-size="12" fill="{color}">{}</text>"#,
            escape(name),
            x = WIDTH - MARGIN - 120.0,
            y = MARGIN + 16.0 * s as f64
        );
    }
    svg.push_str("</svg>\n");
    out.write_all(svg.as_bytes())?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn check_nonempty(profile: &DataProfile) -> Result<()> {
    if profile.solvers.is_empty() || profile.alphas.is_empty() {
        return Err(Error::EmptyRecords);
    }
    Ok(())
}

/// Writes `<stem>.csv` and `<stem>.svg`, returning both paths.
pub fn render_profile(profile: &DataProfile, stem: &Path, title: &str) -> Result<(PathBuf, PathBuf)> {
    check_nonempty(profile)?;
    let csv_path = stem.with_extension("csv");
    let svg_path = stem.with_extension("svg");
    write_profile_csv(profile, std::fs::File::create(&csv_path)?)?;
    write_profile_svg(profile, title, std::fs::File::create(&svg_path)?)?;
    Ok((csv_path, svg_path))
}
