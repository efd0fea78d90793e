use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Default largest degree accepted by the evaluators.
pub const DEFAULT_N_CAP: usize = 10_000;

const RESCALE: f64 = 1e150;

/// π^{-1/4}
pub fn h0_peak() -> f64 {
    PI.powf(-0.25)
}

/// A value held as `mantissa · e^{log_scale}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa * self.log_scale.exp()
    }

    /// log |value|; −∞ at exact zeros.
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::ParameterOutOfRange(format!(
            "Hermite degree {n} exceeds the cap {cap}"
        )));
    }
    Ok(())
}

/// Runs the normalized three-term recurrence up to degree n, seeded with the
/// Gaussian factor kept in the exponent so nothing under- or overflows.
/// Returns (h_{n-1}, h_n) sharing one scale.
pub fn hermite_pair_scaled(n: usize, x: f64) -> (Scaled, Scaled) {
    let mut prev = 0.0f64;
    let mut cur = h0_peak();
    let mut scale = -0.5 * x * x;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            scale += RESCALE.ln();
        }
    }
    (
        Scaled {
            mantissa: prev,
            log_scale: scale,
        },
        Scaled {
            mantissa: cur,
            log_scale: scale,
        },
    )
}

/// Orthonormal Hermite function H_n(x) with the default degree cap.
pub fn hermite_eval(n: usize, x: f64) -> Result<f64> {
    hermite_eval_capped(n, x, DEFAULT_N_CAP)
}

pub fn hermite_eval_capped(n: usize, x: f64, cap: usize) -> Result<f64> {
    check_cap(n, cap)?;
    if !x.is_finite() {
        return Err(Error::NonFinite(format!("Hermite argument {x}")));
    }
    Ok(hermite_pair_scaled(n, x).1.value())
}

/// H_0(x), ..., H_n(x) at one point.
pub fn hermite_eval_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = 0.0f64;
    let mut cur = h0_peak();
    let mut scale = -0.5 * x * x;
    out.push(Scaled { mantissa: cur, log_scale: scale }.value());
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            scale += RESCALE.ln();
        }
        out.push(Scaled { mantissa: cur, log_scale: scale }.value());
    }
    out
}

/// Product of one-dimensional Hermite functions.
pub fn hermite_eval_multi(n: &[usize], x: &[f64]) -> Result<f64> {
    if n.len() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "multi-index has {} components, point has {}",
            n.len(),
            x.len()
        )));
    }
    let mut prod = 1.0;
    for (&nk, &xk) in n.iter().zip(x) {
        prod *= hermite_eval(nk, xk)?;
    }
    Ok(prod)
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Grid half-width and step for sup-norm scans of degrees up to n.
fn sup_grid(n: usize) -> (f64, f64) {
    let t = (2.0 * n as f64 + 1.0).sqrt();
    (t + 2.0, 0.5 / t)
}

/// ‖H_n‖_∞ from a dense scan refined by golden section at the peak.
pub fn sup_norm_estimate(n: usize) -> Result<f64> {
    check_cap(n, DEFAULT_N_CAP)?;
    let (half, step) = sup_grid(n);
    let pts = (half / step).ceil() as usize;
    let f = |x: f64| hermite_pair_scaled(n, x).1.value().abs();
    let mut best = (0usize, f64::NEG_INFINITY);
    // |H_n| is even in x
    for i in 0..=pts {
        let v = f(i as f64 * step);
        if v > best.1 {
            best = (i, v);
        }
    }
    let x0 = best.0 as f64 * step;
    let (_, v) = golden_max(&f, (x0 - step).max(0.0), x0 + step);
    Ok(v.max(best.1))
}

/// ‖H_k‖_∞ for every k ≤ n_max, sharing one scan at the finest step.
pub fn sup_norm_table(n_max: usize) -> Result<Vec<f64>> {
    check_cap(n_max, DEFAULT_N_CAP)?;
    let (half, step) = sup_grid(n_max);
    let pts = (half / step).ceil() as usize;
    let mut best = vec![(0usize, f64::NEG_INFINITY); n_max + 1];
    for i in 0..=pts {
        let vals = hermite_eval_all(n_max, i as f64 * step);
        for (k, v) in vals.iter().enumerate() {
            if v.abs() > best[k].1 {
                best[k] = (i, v.abs());
            }
        }
    }
    Ok(best
        .iter()
        .enumerate()
        .map(|(k, &(i, v))| {
            let f = |x: f64| hermite_pair_scaled(k, x).1.value().abs();
            let x0 = i as f64 * step;
            golden_max(&f, (x0 - step).max(0.0), x0 + step).1.max(v)
        })
        .collect())
}
