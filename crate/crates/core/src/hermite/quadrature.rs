use super::eval::hermite_pair_scaled;
use crate::error::{Error, Result};

pub const DEFAULT_EIGEN_ITERATIONS: usize = 60;

/// Gauss rule for ∫ q(x) e^{-x²} dx.
///
/// `scaled_weights` holds w_i e^{x_i²}, the factor that multiplies
/// f(x_i) H_n(x_i) when integrating f·H_n without the weight function.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermiteRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub log_weights: Vec<f64>,
    pub scaled_weights: Vec<f64>,
}

impl GaussHermiteRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Σ w_i g(x_i)
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }
}

pub fn gauss_hermite_rule(order: usize) -> Result<GaussHermiteRule> {
    gauss_hermite_rule_with(order, DEFAULT_EIGEN_ITERATIONS)
}

/// Nodes from the eigenvalues of the Jacobi matrix (zero diagonal,
/// off-diagonal √(k/2)), polished by Newton steps on H_n; weights from the
/// Christoffel identity w_i e^{x_i²} = 1 / (n H_{n-1}(x_i)²).
pub fn gauss_hermite_rule_with(order: usize, max_iter: usize) -> Result<GaussHermiteRule> {
    if order == 0 {
        return Err(Error::ParameterOutOfRange("quadrature order must be >= 1".into()));
    }
    let mut diag = vec![0.0; order];
    let mut off: Vec<f64> = (0..order)
        .map(|k| if k == 0 { 0.0 } else { (k as f64 / 2.0).sqrt() })
        .collect();
    tridiagonal_eigenvalues(&mut diag, &mut off, max_iter)?;
    let mut nodes = diag;
    nodes.sort_by(f64::total_cmp);

    let nf = order as f64;
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (prev, cur) = hermite_pair_scaled(order, *x);
            // H_n' = √(2n) H_{n-1} − x H_n; both share one scale.
            let deriv = (2.0 * nf).sqrt() * prev.mantissa - *x * cur.mantissa;
            if deriv == 0.0 {
                break;
            }
            let dx = cur.mantissa / deriv;
            *x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }
    // exact symmetry about the origin
    for i in 0..order / 2 {
        let j = order - 1 - i;
        let m = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -m;
        nodes[j] = m;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }

    let mut log_scaled = Vec::with_capacity(order);
    for &x in &nodes {
        let (prev, _) = hermite_pair_scaled(order, x);
        log_scaled.push(-nf.ln() - 2.0 * prev.ln_abs());
    }
    let scaled_weights: Vec<f64> = log_scaled.iter().map(|l| l.exp()).collect();
    let log_weights: Vec<f64> = log_scaled
        .iter()
        .zip(&nodes)
        .map(|(l, x)| l - x * x)
        .collect();
    let weights = log_weights.iter().map(|l| l.exp()).collect();
    Ok(GaussHermiteRule {
        nodes,
        weights,
        log_weights,
        scaled_weights,
    })
}

/// Symmetric tridiagonal QL with implicit shifts; eigenvalues overwrite
/// `diag`. `off[k]` couples rows k−1 and k (off[0] unused).
fn tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64], max_iter: usize) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iter {
                return Err(Error::NoConvergence(max_iter));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
