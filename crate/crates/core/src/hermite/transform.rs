use rayon::prelude::*;

use super::eval::{h0_peak, hermite_eval_all};
use super::field::{BoxShape, CoefficientField, FieldKind, SampledFunction, MAX_ENTRIES};
use super::quadrature::{gauss_hermite_rule, GaussHermiteRule};
use crate::error::{Error, Result};
use crate::C64;

/// Extra quadrature nodes beyond the largest box order.
pub const QUAD_GUARD: usize = 16;

pub fn default_quad_order(shape: &BoxShape) -> usize {
    shape.max_order() + QUAD_GUARD
}

/// Contract one axis of a row-major tensor with a `rows × dims[axis]` matrix.
fn contract_axis(data: &[C64], dims: &[usize], axis: usize, mat: &[f64], rows: usize) -> Vec<C64> {
    let cols = dims[axis];
    let outer: usize = dims[..axis].iter().product();
    let inner: usize = dims[axis + 1..].iter().product();
    let mut out = vec![C64::new(0.0, 0.0); outer * rows * inner];
    out.par_chunks_mut(inner)
        .enumerate()
        .for_each(|(or, chunk)| {
            let (o, r) = (or / rows, or % rows);
            let mrow = &mat[r * cols..(r + 1) * cols];
            for (j, &m) in mrow.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                let src = &data[(o * cols + j) * inner..(o * cols + j + 1) * inner];
                for (dst, s) in chunk.iter_mut().zip(src) {
                    *dst += s * m;
                }
            }
        });
    out
}

/// `rows × points` table of H_n(x_j) for n < rows.
fn hermite_table(rows: usize, points: &[f64]) -> Vec<f64> {
    let cols = points.len();
    let mut t = vec![0.0; rows * cols];
    let per_point: Vec<Vec<f64>> = points
        .par_iter()
        .map(|&x| hermite_eval_all(rows - 1, x))
        .collect();
    for (j, vals) in per_point.iter().enumerate() {
        for (n, v) in vals.iter().enumerate() {
            t[n * cols + j] = *v;
        }
    }
    t
}

fn resolve_rule(shape: &BoxShape, quad_order: Option<usize>) -> Result<GaussHermiteRule> {
    let q = quad_order.unwrap_or_else(|| default_quad_order(shape));
    if q < shape.max_order() {
        return Err(Error::ParameterOutOfRange(format!(
            "quadrature order {q} is below the box order {}",
            shape.max_order()
        )));
    }
    let total = (0..shape.dim()).try_fold(1usize, |acc, _| acc.checked_mul(q));
    if total.is_none_or(|t| t > MAX_ENTRIES) {
        return Err(Error::ParameterOutOfRange(format!(
            "tensor quadrature grid {q}^{} is too large",
            shape.dim()
        )));
    }
    gauss_hermite_rule(q)
}

/// Fourier-Hermite coefficients a_n = ∫ f H_n by tensor Gauss-Hermite
/// quadrature. The Gaussian de-weighting is folded into the scaled weights,
/// so f is sampled as-is at the nodes.
pub fn analyze<F>(
    f: F,
    shape: &BoxShape,
    quad_order: Option<usize>,
    kind: FieldKind,
) -> Result<CoefficientField>
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    let rule = resolve_rule(shape, quad_order)?;
    let d = shape.dim();
    let q = rule.order();
    let npts = q.pow(d as u32);
    let samples: Vec<C64> = (0..npts)
        .into_par_iter()
        .map(|flat| {
            let mut x = [0.0f64; 3];
            let mut w = 1.0;
            let mut rem = flat;
            for k in (0..d).rev() {
                let i = rem % q;
                rem /= q;
                x[k] = rule.nodes[i];
                w *= rule.scaled_weights[i];
            }
            f(&x[..d]) * w
        })
        .collect();
    if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite(format!("sample at quadrature node #{i}")));
    }
    contract_to_box(samples, shape, &rule, kind)
}

fn contract_to_box(
    samples: Vec<C64>,
    shape: &BoxShape,
    rule: &GaussHermiteRule,
    kind: FieldKind,
) -> Result<CoefficientField> {
    let d = shape.dim();
    let mut dims = vec![rule.order(); d];
    let mut data = samples;
    for axis in 0..d {
        let rows = shape.orders()[axis];
        let table = hermite_table(rows, &rule.nodes);
        data = contract_axis(&data, &dims, axis, &table, rows);
        dims[axis] = rows;
    }
    CoefficientField::new(shape.clone(), kind, data)
}

/// True when every axis of `samples` sits exactly on the Gauss-Hermite nodes
/// of order `q`.
pub fn samples_on_rule(samples: &SampledFunction, rule: &GaussHermiteRule) -> bool {
    samples.grids().iter().all(|g| {
        g.len() == rule.order()
            && g
                .iter()
                .zip(&rule.nodes)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0))
    })
}

/// Analysis of tabulated samples. Samples already on the quadrature nodes
/// are used directly; otherwise they are interpolated multilinearly (zero
/// outside the sampled range).
pub fn analyze_samples(
    samples: &SampledFunction,
    shape: &BoxShape,
    quad_order: Option<usize>,
    kind: FieldKind,
) -> Result<CoefficientField> {
    if samples.dim() != shape.dim() {
        return Err(Error::DimensionMismatch(format!(
            "samples are {}-d, box is {}-d",
            samples.dim(),
            shape.dim()
        )));
    }
    let rule = resolve_rule(shape, quad_order)?;
    if samples_on_rule(samples, &rule) {
        let d = shape.dim();
        let q = rule.order();
        let vals: Vec<C64> = samples
            .values()
            .iter()
            .enumerate()
            .map(|(flat, v)| {
                let mut w = 1.0;
                let mut rem = flat;
                for _ in 0..d {
                    w *= rule.scaled_weights[rem % q];
                    rem /= q;
                }
                v * w
            })
            .collect();
        return contract_to_box(vals, shape, &rule, kind);
    }
    analyze(|x| samples.interpolate(x), shape, Some(rule.order()), kind)
}

const RESCALE: f64 = 1e150;

/// Σ_n a_n H_n(x) in one dimension by backward (Clenshaw) recurrence with
/// the growing partial sums kept under a running exponent.
pub fn clenshaw(coeffs: &[C64], x: f64) -> C64 {
    let n = coeffs.len();
    if n == 0 {
        return C64::new(0.0, 0.0);
    }
    let mut b1 = C64::new(0.0, 0.0); // b_{k+1}
    let mut b2 = C64::new(0.0, 0.0); // b_{k+2}
    let mut scale = 0.0f64;
    for k in (0..n).rev() {
        let kf = k as f64;
        let alpha = (2.0 / (kf + 1.0)).sqrt() * x;
        let beta = ((kf + 1.0) / (kf + 2.0)).sqrt();
        let ak = if scale == 0.0 {
            coeffs[k]
        } else {
            coeffs[k] * (-scale).exp()
        };
        let b0 = ak + b1 * alpha - b2 * beta;
        b2 = b1;
        b1 = b0;
        if b1.norm() > RESCALE {
            b1 /= RESCALE;
            b2 /= RESCALE;
            scale += RESCALE.ln();
        }
    }
    let factor = h0_peak() * (scale - 0.5 * x * x).exp();
    b1 * factor
}

/// Σ_n a_n H_n(x) at one point.
pub fn synthesize_point(a: &CoefficientField, x: &[f64]) -> Result<C64> {
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} components, field is {}-d",
            x.len(),
            a.dim()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("synthesis point".into()));
    }
    if a.dim() == 1 {
        return Ok(clenshaw(a.data(), x[0]));
    }
    let tables: Vec<Vec<f64>> = a
        .shape()
        .orders()
        .iter()
        .zip(x)
        .map(|(&o, &xk)| hermite_eval_all(o - 1, xk))
        .collect();
    let mut acc = C64::new(0.0, 0.0);
    for (n, v) in a.iter() {
        let mut h = 1.0;
        for (k, &nk) in n.iter().enumerate() {
            h *= tables[k][nk];
        }
        acc += v * h;
    }
    Ok(acc)
}

/// Σ_n a_n H_n on a tensor grid.
pub fn synthesize_grid(a: &CoefficientField, grids: &[Vec<f64>]) -> Result<SampledFunction> {
    if grids.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} grids for a {}-d field",
            grids.len(),
            a.dim()
        )));
    }
    let mut dims = a.shape().orders().to_vec();
    let mut data = a.data().to_vec();
    for (axis, g) in grids.iter().enumerate() {
        let rows = g.len();
        let cols = dims[axis];
        // transpose of the Hermite table: rows are grid points
        let t = hermite_table(cols, g);
        let mut mat = vec![0.0; rows * cols];
        for n in 0..cols {
            for j in 0..rows {
                mat[j * cols + n] = t[n * rows + j];
            }
        }
        data = contract_axis(&data, &dims, axis, &mat, rows);
        dims[axis] = rows;
    }
    SampledFunction::new(grids.to_vec(), data)
}

/// Evenly spaced grid with n points on [a, b].
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
        .collect()
}
