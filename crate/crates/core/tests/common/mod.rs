//! Reference computations written independently of the library.
#![allow(dead_code)]

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Row-major `n × n` times vector.
pub fn matvec(a: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| dot(&a[i * n..(i + 1) * n], x)).collect()
}

fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i * n + c].abs().total_cmp(&a[j * n + c].abs()))?;
        if a[p * n + c].abs() < 1e-300 {
            return None;
        }
        for k in 0..n {
            a.swap(c * n + k, p * n + k);
        }
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r * n + c] / a[c * n + c];
            for k in c..n {
                a[r * n + k] -= m * a[c * n + k];
            }
            b[r] -= m * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r * n + k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r * n + r];
    }
    Some(x)
}

/// Exact-gradient trust-region method with a damped BFGS model and dogleg
/// steps. A gradient costs `n` evaluations on top of the function value.
///
/// Returns the best value found within `budget` evaluations.
pub fn exact_gradient_tr(
    f: &dyn Fn(&[f64]) -> f64,
    grad: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    budget: usize,
) -> f64 {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = grad(&x);
    let mut evals = 1 + n;
    let mut b: Vec<f64> = (0..n * n).map(|k| if k % (n + 1) == 0 { 1.0 } else { 0.0 }).collect();
    let mut delta = 1.0;
    let mut best = fx;
    while evals < budget && delta > 1e-14 {
        let bg = matvec(&b, &g);
        let gbg = dot(&g, &bg);
        let gn = norm(&g);
        if gn == 0.0 {
            break;
        }
        let newton = solve_dense(b.clone(), g.iter().map(|v| -v).collect());
        let step = match newton {
            Some(p) if norm(&p) <= delta => p,
            Some(p) => {
                let tc = if gbg > 0.0 { (gn * gn / gbg).min(delta / gn) } else { delta / gn };
                let c: Vec<f64> = g.iter().map(|v| -tc * v).collect();
                if norm(&c) >= delta - 1e-15 {
                    c
                } else {
                    let dir: Vec<f64> = p.iter().zip(&c).map(|(a, b)| a - b).collect();
                    let (aa, bb, cc) = (dot(&dir, &dir), 2.0 * dot(&c, &dir), dot(&c, &c) - delta * delta);
                    let t = (-bb + (bb * bb - 4.0 * aa * cc).max(0.0).sqrt()) / (2.0 * aa);
                    c.iter().zip(&dir).map(|(c, d)| c + t * d).collect()
                }
            }
            None => g.iter().map(|v| -delta / gn * v).collect(),
        };
        let pred = -(dot(&g, &step) + 0.5 * dot(&step, &matvec(&b, &step)));
        let xt: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + s).collect();
        let ft = f(&xt);
        evals += 1;
        best = best.min(ft);
        let ratio = if pred > 0.0 { (fx - ft) / pred } else { -1.0 };
        if ratio > 0.01 {
            if evals + n > budget {
                break;
            }
            let gt = grad(&xt);
            evals += n;
            let y: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
            let bs = matvec(&b, &step);
            let sbs = dot(&step, &bs);
            let sy = dot(&step, &y);
            // Powell damping keeps the model positive definite.
            let theta = if sy >= 0.2 * sbs { 1.0 } else { 0.8 * sbs / (sbs - sy) };
            let r: Vec<f64> = y.iter().zip(&bs).map(|(y, bs)| theta * y + (1.0 - theta) * bs).collect();
            let sr = dot(&step, &r);
            if sbs > 0.0 && sr > 0.0 {
                for i in 0..n {
                    for j in 0..n {
                        b[i * n + j] += r[i] * r[j] / sr - bs[i] * bs[j] / sbs;
                    }
                }
            }
            x = xt;
            fx = ft;
            g = gt;
            if ratio > 0.75 {
                delta = (2.0 * delta).min(1e3);
            }
        } else {
            delta *= 0.25;
        }
    }
    best
}

/// Projected gradient descent with central differences, Armijo backtracking
/// and step doubling. Difference points are kept inside `[lo, hi]`.
pub fn projected_fd_descent(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], x0: &[f64], budget: usize) -> f64 {
    let n = x0.len();
    let proj = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut evals = 1usize;
    let mut t = 1e-3;
    while evals + 2 * n < budget {
        let mut g = vec![0.0; n];
        for i in 0..n {
            let h = 1e-6 * x[i].abs().max(1.0);
            let mut xp = x.clone();
            xp[i] = (x[i] + h).min(hi[i]);
            let mut xm = x.clone();
            xm[i] = (x[i] - h).max(lo[i]);
            g[i] = (f(&xp) - f(&xm)) / (xp[i] - xm[i]);
            evals += 2;
        }
        let mut accepted = false;
        while evals < budget {
            let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - t * b).collect();
            proj(&mut y);
            let s: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let gs = dot(&g, &s);
            let fy = f(&y);
            evals += 1;
            if fy <= fx + 1e-4 * gs && fy < fx {
                x = y;
                fx = fy;
                t *= 2.0;
                accepted = true;
                break;
            }
            t *= 0.5;
            if t < 1e-20 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    fx
}

/// `−(1/r) min {<g, s> : lo ≤ x + s ≤ hi, ‖s‖ ≤ r}` from the KKT conditions:
/// `s(λ) = clamp(−g/λ, lo − x, hi − x)` with `λ` bisected so `‖s‖ = r`.
pub fn box_ball_eta(g: &[f64], x: &[f64], lo: &[f64], hi: &[f64], r: f64) -> f64 {
    let a: Vec<f64> = lo.iter().zip(x).map(|(l, x)| l - x).collect();
    let b: Vec<f64> = hi.iter().zip(x).map(|(h, x)| h - x).collect();
    let s_of = |lambda: f64| -> Vec<f64> {
        (0..g.len())
            .map(|i| {
                if lambda == 0.0 {
                    if g[i] > 0.0 {
                        a[i]
                    } else if g[i] < 0.0 {
                        b[i]
                    } else {
                        0.0
                    }
                } else {
                    (-g[i] / lambda).clamp(a[i], b[i])
                }
            })
            .collect()
    };
    let vertex = s_of(0.0);
    let s = if norm(&vertex) <= r {
        vertex
    } else {
        let (mut lo_l, mut hi_l) = (0.0, 1.0);
        while norm(&s_of(hi_l)) > r {
            hi_l *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo_l + hi_l);
            if norm(&s_of(mid)) > r {
                lo_l = mid;
            } else {
                hi_l = mid;
            }
        }
        s_of(hi_l)
    };
    -dot(g, &s) / r
}

/// `η_r` over a ball `‖y − c‖ ≤ R` that fits inside `‖s‖ ≤ r` around `x`.
pub fn contained_ball_eta(g: &[f64], x: &[f64], center: &[f64], radius: f64, r: f64) -> Option<f64> {
    let cx: Vec<f64> = center.iter().zip(x).map(|(c, x)| c - x).collect();
    if norm(&cx) + radius > r {
        return None;
    }
    Some(-(dot(g, &cx) - radius * norm(g)) / r)
}

/// Minimum of `<g, d> + ½ dᵀHd` over `{‖d‖ ≤ Δ, lo ≤ x + d ≤ hi}` in 2-D.
///
/// Dense lattice of pitch `Δ/400` plus fine samples of every boundary piece
/// and every corner of the region.
pub fn model_min_2d(g: &[f64; 2], h: &[f64; 4], x: &[f64; 2], lo: &[f64; 2], hi: &[f64; 2], delta: f64) -> f64 {
    let m = |d0: f64, d1: f64| g[0] * d0 + g[1] * d1 + 0.5 * (h[0] * d0 * d0 + (h[1] + h[2]) * d0 * d1 + h[3] * d1 * d1);
    let a = [lo[0] - x[0], lo[1] - x[1]];
    let b = [hi[0] - x[0], hi[1] - x[1]];
    let inside = |d0: f64, d1: f64| d0 * d0 + d1 * d1 <= delta * delta && d0 >= a[0] && d0 <= b[0] && d1 >= a[1] && d1 <= b[1];
    let mut best = 0.0f64;
    let k = 400i64;
    let pitch = delta / k as f64;
    for i in -k..=k {
        for j in -k..=k {
            let (d0, d1) = (i as f64 * pitch, j as f64 * pitch);
            if inside(d0, d1) {
                best = best.min(m(d0, d1));
            }
        }
    }
    let fine = 1 << 16;
    for q in 0..fine {
        let t = std::f64::consts::TAU * q as f64 / fine as f64;
        let (d0, d1) = (delta * t.cos(), delta * t.sin());
        let (c0, c1) = (d0.clamp(a[0], b[0]), d1.clamp(a[1], b[1]));
        if c0 * c0 + c1 * c1 <= delta * delta {
            best = best.min(m(c0, c1));
        }
    }
    for axis in 0..2 {
        for face in [a[axis], b[axis]] {
            let other = 1 - axis;
            for q in 0..=fine {
                let t = a[other] + (b[other] - a[other]) * q as f64 / fine as f64;
                let mut d = [0.0; 2];
                d[axis] = face;
                d[other] = t;
                if d[0] * d[0] + d[1] * d[1] <= delta * delta {
                    best = best.min(m(d[0], d[1]));
                }
            }
            // Face line meets the circle.
            let rest = delta * delta - face * face;
            if rest >= 0.0 {
                for sign in [-1.0, 1.0] {
                    let mut d = [0.0; 2];
                    d[axis] = face;
                    d[other] = sign * rest.sqrt();
                    if d[other] >= a[other] && d[other] <= b[other] {
                        best = best.min(m(d[0], d[1]));
                    }
                }
            }
        }
    }
    best
}
