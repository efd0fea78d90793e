//! Coefficient-side diagnostics for test functions (ultrafast falloff) and
//! dual elements (ultrafast growth), the bilinear pairing, and the sup-type
//! seminorm estimate.
//!
//! Weighted norms use the squared weight, ‖a‖²_θ = Σ |a_n|² exp[2 Σ_k M(θ_k √n_k)]
//! (and exp[−2 Σ M] on the dual side), so the falloff envelope e^{−M(θ₀√n)}
//! and the growth envelope e^{M(θ₀√n)} both switch behaviour at θ = θ₀.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermite::{
    ladder_apply, synthesize_grid, total_order, BoxShape, CoefficientField, FieldKind, LadderOp,
};
use crate::weights::AssociatedFunctionTable;
use crate::C64;

/// Relative change between the box-N and box-N/2 norms below which a norm
/// counts as converged.
pub const STABILITY_TOL: f64 = 1e-6;

/// Σ_k M(θ_k √n_k) for every index in a box.
fn weights_over(table: &AssociatedFunctionTable, theta: &[f64], shape: &BoxShape) -> Result<Vec<f64>> {
    if theta.len() != shape.dim() {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} components, field is {}-d",
            theta.len(),
            shape.dim()
        )));
    }
    shape.indices().map(|n| table.log_weight(theta, &n)).collect()
}

/// ½ log Σ exp(terms), skipping −∞ terms.
fn half_log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = terms.map(|t| (t - max).exp()).sum();
    0.5 * (max + s.ln())
}

fn side_sign(kind: FieldKind) -> f64 {
    match kind {
        FieldKind::Test => 1.0,
        FieldKind::Dual => -1.0,
    }
}

/// log ‖a‖_θ with ‖a‖²_θ = Σ |a_n|² exp[±2 Σ_k M(θ_k √n_k)], + for test
/// fields and − for dual fields.
pub fn weighted_norm(a: &CoefficientField, table: &AssociatedFunctionTable, theta: &[f64]) -> Result<f64> {
    let w = weights_over(table, theta, a.shape())?;
    let sign = side_sign(a.kind());
    let terms = a
        .data()
        .iter()
        .zip(&w)
        .map(move |(z, wn)| 2.0 * z.norm().ln() + 2.0 * sign * wn);
    Ok(half_log_sum_exp(terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipKind {
    TestRoumieu,
    TestBeurling,
    DualRoumieu,
    DualBeurling,
}

impl MembershipKind {
    pub fn field_kind(self) -> FieldKind {
        match self {
            MembershipKind::TestRoumieu | MembershipKind::TestBeurling => FieldKind::Test,
            MembershipKind::DualRoumieu | MembershipKind::DualBeurling => FieldKind::Dual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub kind: MembershipKind,
    pub theta_grid: Vec<Vec<f64>>,
    /// log ‖a‖_θ on the full box.
    pub log_norms: Vec<f64>,
    /// log ‖a‖_θ on the half box.
    pub log_norms_half: Vec<f64>,
    pub stable: Vec<bool>,
    /// Test side: largest θ with a converged norm. Dual side: smallest θ
    /// from which every norm converges.
    pub theta_star: Option<Vec<f64>>,
    /// θ* is the first or last probe, so the true boundary may lie outside.
    pub at_boundary: bool,
    /// Membership read off the grid: "some θ" or "every θ" per kind.
    pub member_on_grid: bool,
}

/// Probe weighted norms along a θ grid (ordered by increasing θ) and mark
/// each probe stable when the norm on the full box and on the half box agree
/// to [`STABILITY_TOL`].
pub fn classify(
    a: &CoefficientField,
    table: &AssociatedFunctionTable,
    grid: &[Vec<f64>],
    kind: MembershipKind,
) -> Result<MembershipReport> {
    if grid.is_empty() {
        return Err(Error::ParameterOutOfRange("theta grid is empty".into()));
    }
    let field = a.clone().with_kind(kind.field_kind());
    let half = field.resized(field.shape().halved()?)?;
    let norms: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|theta| Ok((weighted_norm(&field, table, theta)?, weighted_norm(&half, table, theta)?)))
        .collect::<Result<_>>()?;
    let stable: Vec<bool> = norms
        .iter()
        .map(|&(full, half)| {
            if full == f64::NEG_INFINITY && half == f64::NEG_INFINITY {
                return true;
            }
            let rel = (full - half).exp_m1().abs();
            rel.is_finite() && rel < STABILITY_TOL
        })
        .collect();
    let last = grid.len() - 1;
    let (theta_star, at_boundary) = match kind.field_kind() {
        FieldKind::Test => match stable.iter().position(|s| !s) {
            None => (Some(grid[last].clone()), true),
            Some(0) => (None, true),
            Some(i) => (Some(grid[i - 1].clone()), false),
        },
        FieldKind::Dual => match stable.iter().rposition(|s| !s) {
            None => (Some(grid[0].clone()), true),
            Some(i) if i == last => (None, true),
            Some(i) => (Some(grid[i + 1].clone()), false),
        },
    };
    let member_on_grid = match kind {
        MembershipKind::TestRoumieu | MembershipKind::DualBeurling => stable.iter().any(|&s| s),
        MembershipKind::TestBeurling | MembershipKind::DualRoumieu => stable.iter().all(|&s| s),
    };
    Ok(MembershipReport {
        kind,
        theta_grid: grid.to_vec(),
        log_norms: norms.iter().map(|n| n.0).collect(),
        log_norms_half: norms.iter().map(|n| n.1).collect(),
        stable,
        theta_star,
        at_boundary,
        member_on_grid,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub passes: bool,
    /// max_n (log|b_n| − Σ_k M(θ_k √n_k)), the log of the fitted constant.
    pub log_c: f64,
}

/// Non-increase (up to rounding) of per-shell maxima over the outer half of
/// the shells. Shells without finite entries are skipped.
pub(crate) fn tail_non_increasing(shell_max: &[f64]) -> bool {
    let start = (shell_max.len() - 1) / 2;
    let tail: Vec<f64> = shell_max[start..]
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    tail.windows(2)
        .all(|w| w[1] <= w[0] + 1e-9 * (1.0 + w[0].abs()))
}

/// |b_n| ≤ C exp[Σ_k M(θ_k √n_k)]: reports log C over the box and passes when
/// log|b_n| − Σ M is non-increasing across the outer half of the total-order
/// shells.
pub fn growth_check(b: &CoefficientField, table: &AssociatedFunctionTable, theta: &[f64]) -> Result<GrowthCheck> {
    let w = weights_over(table, theta, b.shape())?;
    let nu_max: usize = b.shape().orders().iter().map(|o| o - 1).sum();
    let mut shell = vec![f64::NEG_INFINITY; nu_max + 1];
    let mut log_c = f64::NEG_INFINITY;
    for ((n, z), wn) in b.iter().zip(&w) {
        let q = z.norm().ln() - wn;
        log_c = log_c.max(q);
        let s = &mut shell[total_order(&n)];
        *s = s.max(q);
    }
    Ok(GrowthCheck {
        passes: tail_non_increasing(&shell),
        log_c,
    })
}

/// Compensated (Neumaier) complex sum.
pub fn compensated_sum(terms: impl Iterator<Item = C64>) -> C64 {
    fn step(sum: &mut f64, c: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *c += (*sum - t) + x;
        } else {
            *c += (x - t) + *sum;
        }
        *sum = t;
    }
    let (mut re, mut cre, mut im, mut cim) = (0.0, 0.0, 0.0, 0.0);
    for z in terms {
        step(&mut re, &mut cre, z.re);
        step(&mut im, &mut cim, z.im);
    }
    C64::new(re + cre, im + cim)
}

/// ⟨f, φ⟩ = Σ_n b_n a_n over the common box; bilinear, no conjugation.
pub fn parseval_pair(b: &CoefficientField, a: &CoefficientField) -> Result<C64> {
    let common = b.shape().intersect(a.shape())?;
    Ok(compensated_sum(common.indices().map(|n| b.get(&n) * a.get(&n))))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeminormEstimate {
    pub value: f64,
    pub log_value: f64,
    /// (α, β) attaining the maximum.
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    /// Every evaluated term as (α, β, weighted sup).
    pub terms: Vec<(Vec<usize>, Vec<usize>, f64)>,
}

/// Multi-indices with |α| ≤ max and every entry a multiple of `step`.
fn bounded_indices(dim: usize, max: usize, step: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for prefix in &out {
            let used: usize = prefix.iter().sum();
            let mut k = 0;
            while used + k <= max {
                let mut v = prefix.clone();
                v.push(k);
                next.push(v);
                k += step;
            }
        }
        out = next;
    }
    out
}

fn grow(a: &CoefficientField, op: LadderOp) -> Result<CoefficientField> {
    ladder_apply(a, op).map_err(|e| match e {
        Error::BoxExhausted(m) | Error::ParameterOutOfRange(m) => Error::BoxExhausted(m),
        other => other,
    })
}

/// sup over α, β of m^{|α|+|β|}/(M_{|α|} M_{|β|}) ‖Π_k (1+x_k²)^{β_k/2} ∂^α φ‖_∞,
/// with ∂ and x realized by ladder operators and the sup taken on `grids`.
/// β runs over even entries only, so the weight is a polynomial.
pub fn seminorm_estimate(
    a: &CoefficientField,
    m: f64,
    table: &AssociatedFunctionTable,
    alpha_max: usize,
    beta_max: usize,
    grids: &[Vec<f64>],
) -> Result<SeminormEstimate> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::ParameterOutOfRange(format!("m must be positive, got {m}")));
    }
    if beta_max % 2 != 0 {
        return Err(Error::ParameterOutOfRange(format!(
            "beta_max must be even, got {beta_max}"
        )));
    }
    if grids.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} grids for a {}-d field",
            grids.len(),
            a.dim()
        )));
    }
    let grown: Vec<usize> = a
        .shape()
        .orders()
        .iter()
        .map(|o| o + alpha_max + beta_max)
        .collect();
    BoxShape::new(grown).map_err(|e| Error::BoxExhausted(e.to_string()))?;

    let seq = table.sequence();
    let d = a.dim();
    let mut terms = Vec::new();
    for alpha in bounded_indices(d, alpha_max, 1) {
        let mut da = a.clone();
        for (axis, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                da = grow(&da, LadderOp::Derivative(axis))?;
            }
        }
        for beta in bounded_indices(d, beta_max, 2) {
            let mut w = da.clone();
            for (axis, &k) in beta.iter().enumerate() {
                for _ in 0..k / 2 {
                    let x2 = grow(&grow(&w, LadderOp::Position(axis))?, LadderOp::Position(axis))?;
                    w = x2.add(&w.resized(x2.shape().clone())?)?;
                }
            }
            let samples = synthesize_grid(&w, grids)?;
            let sup = samples.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
            let (la, lb) = (alpha.iter().sum::<usize>(), beta.iter().sum::<usize>());
            let log_factor =
                (la + lb) as f64 * m.ln() - seq.log_m(la as u64)? - seq.log_m(lb as u64)?;
            terms.push((alpha.clone(), beta.clone(), (log_factor + sup.ln()).exp()));
        }
    }
    let (alpha, beta, value) = terms
        .iter()
        .cloned()
        .fold((vec![], vec![], f64::NEG_INFINITY), |acc, t| if t.2 > acc.2 { t } else { acc });
    Ok(SeminormEstimate {
        value,
        log_value: value.ln(),
        alpha,
        beta,
        terms,
    })
}
