//! Dormand–Prince 5(4) with step-size control and dense output.

use crate::error::{Error, Result};
use crate::scalar::Real;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Fifth- minus fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Failure once the step falls below `h_min_rel · max(1, |t|)`.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_min_rel: 1e-14,
            max_steps: 200_000,
        }
    }
}

struct Stages<T> {
    k: [Vec<T>; 7],
    y_new: Vec<T>,
    err: Vec<T>,
}

/// One Dormand–Prince step from `(t, y)` with `k[0] = f(t, y)` on entry.
/// Leaves `k[6] = f(t + h, y_new)`.
fn step<T, F>(rhs: &F, t: T, y: &[T], h: T, st: &mut Stages<T>)
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    let n = y.len();
    let lit = T::lit;
    let mut tmp = vec![T::zero(); n];
    let stage = |tmp: &mut Vec<T>, k: &[Vec<T>; 7], coeffs: &[(usize, f64)]| {
        for i in 0..n {
            let mut acc = T::zero();
            for &(j, a) in coeffs {
                acc += lit(a) * k[j][i];
            }
            tmp[i] = y[i] + h * acc;
        }
    };
    let rows: [(&[(usize, f64)], f64); 6] = [
        (&[(0, A21)], C2),
        (&[(0, A31), (1, A32)], C3),
        (&[(0, A41), (1, A42), (2, A43)], C4),
        (&[(0, A51), (1, A52), (2, A53), (3, A54)], C5),
        (&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], 1.0),
        (&[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)], 1.0),
    ];
    for (s, (coeffs, c)) in rows.iter().enumerate() {
        stage(&mut tmp, &st.k, coeffs);
        rhs(t + lit(*c) * h, &tmp, &mut st.k[s + 1]);
        if s == 5 {
            st.y_new.copy_from_slice(&tmp);
        }
    }
    let k = &st.k;
    for i in 0..n {
        st.err[i] = h
            * (lit(E1) * k[0][i] + lit(E3) * k[2][i] + lit(E4) * k[3][i] + lit(E5) * k[4][i]
                + lit(E6) * k[5][i]
                + lit(E7) * k[6][i]);
    }
}

/// Dense-output coefficients for the last accepted step.
fn dense<T: Real>(y0: &[T], y1: &[T], h: T, k: &[Vec<T>; 7]) -> [Vec<T>; 5] {
    let n = y0.len();
    let lit = T::lit;
    let mut r = [vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]];
    for i in 0..n {
        let diff = y1[i] - y0[i];
        let bspl = h * k[0][i] - diff;
        r[0][i] = y0[i];
        r[1][i] = diff;
        r[2][i] = bspl;
        r[3][i] = diff - h * k[6][i] - bspl;
        r[4][i] = h
            * (lit(D1) * k[0][i] + lit(D3) * k[2][i] + lit(D4) * k[3][i] + lit(D5) * k[4][i]
                + lit(D6) * k[5][i]
                + lit(D7) * k[6][i]);
    }
    r
}

fn eval_dense<T: Real>(r: &[Vec<T>; 5], theta: T) -> Vec<T> {
    let th1 = T::one() - theta;
    (0..r[0].len())
        .map(|i| r[0][i] + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i]))))
        .collect()
}

fn all_finite<T: Real>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// States at each of `times` (nondecreasing, all `≥ t0`) for `y' = rhs(t, y)`.
pub fn integrate<T, F>(rhs: F, t0: T, y0: &[T], times: &[T], opts: &OdeOptions) -> Result<Vec<Vec<T>>>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    let n = y0.len();
    if times.windows(2).any(|w| !(w[1] >= w[0])) || times.first().is_some_and(|&t| t < t0) {
        return Err(Error::Integration("output times must be nondecreasing and after t0".into()));
    }
    if !all_finite(y0) {
        return Err(Error::Integration("non-finite initial state".into()));
    }
    let t_end = match times.last() {
        Some(&t) => t,
        None => return Ok(Vec::new()),
    };
    let (rtol, atol) = (T::lit(opts.rtol), T::lit(opts.atol));
    let mut out = Vec::with_capacity(times.len());
    let mut next_out = 0;
    while next_out < times.len() && times[next_out] == t0 {
        out.push(y0.to_vec());
        next_out += 1;
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut st = Stages {
        k: std::array::from_fn(|_| vec![T::zero(); n]),
        y_new: vec![T::zero(); n],
        err: vec![T::zero(); n],
    };
    rhs(t, &y, &mut st.k[0]);
    if !all_finite(&st.k[0]) {
        return Err(Error::Integration(format!("non-finite derivative at t = {t}")));
    }

    // Initial step from the scaled size of y and y'.
    let mut d0 = T::zero();
    let mut d1 = T::zero();
    for i in 0..n {
        let sc = atol + rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (st.k[0][i] / sc).powi(2);
    }
    let nf = T::from_count(n.max(1));
    let (d0, d1) = ((d0 / nf).sqrt(), (d1 / nf).sqrt());
    let span = t_end - t0;
    let mut h = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    h = h.min(span).max(T::epsilon() * span.max(T::one()));

    let safety = T::lit(0.9);
    let fifth = T::lit(0.2);
    let mut steps = 0;
    while next_out < times.len() {
        if steps >= opts.max_steps {
            return Err(Error::Integration(format!("step limit reached at t = {t}")));
        }
        let h_min = T::lit(opts.h_min_rel) * t.abs().max(T::one());
        if h < h_min {
            return Err(Error::Integration(format!("step size underflow at t = {t}")));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        steps += 1;
        step(&rhs, t, &y, h, &mut st);

        let mut err = T::zero();
        let finite = all_finite(&st.y_new) && all_finite(&st.k[6]);
        if finite {
            for i in 0..n {
                let sc = atol + rtol * y[i].abs().max(st.y_new[i].abs());
                err += (st.err[i] / sc).powi(2);
            }
            err = (err / nf).sqrt();
        }
        if !finite || !err.is_finite() {
            h *= T::lit(0.25);
            continue;
        }
        if err > T::one() {
            let factor = (safety * err.powf(-fifth)).max(T::lit(0.2));
            h *= factor;
            continue;
        }

        let t_new = if last { t_end } else { t + h };
        let coeffs = dense(&y, &st.y_new, h, &st.k);
        while next_out < times.len() && times[next_out] <= t_new {
            let theta = if h > T::zero() { (times[next_out] - t) / h } else { T::one() };
            out.push(if times[next_out] == t_new {
                st.y_new.clone()
            } else {
                eval_dense(&coeffs, theta)
            });
            next_out += 1;
        }
        t = t_new;
        y.copy_from_slice(&st.y_new);
        let fsal = std::mem::take(&mut st.k[6]);
        st.k[6] = std::mem::replace(&mut st.k[0], fsal);

        let factor = if err.is_zero() {
            T::lit(5.0)
        } else {
            (safety * err.powf(-fifth)).clamp(T::lit(0.2), T::lit(5.0))
        };
        h *= factor;
    }
    Ok(out)
}

/// `steps` equal fifth-order steps from `t0` to `t1`, without error control.
pub fn integrate_fixed<T, F>(rhs: F, t0: T, y0: &[T], t1: T, steps: usize) -> Vec<T>
where
    T: Real,
    F: Fn(T, &[T], &mut [T]),
{
    let n = y0.len();
    let h = (t1 - t0) / T::from_count(steps.max(1));
    let mut st = Stages {
        k: std::array::from_fn(|_| vec![T::zero(); n]),
        y_new: vec![T::zero(); n],
        err: vec![T::zero(); n],
    };
    let mut y = y0.to_vec();
    let mut t = t0;
    for _ in 0..steps.max(1) {
        rhs(t, &y, &mut st.k[0]);
        step(&rhs, t, &y, h, &mut st);
        y.copy_from_slice(&st.y_new);
        t += h;
    }
    y
}
