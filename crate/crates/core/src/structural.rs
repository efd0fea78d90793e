//! Regularization of dual coefficients and the oscillator-power series that
//! rebuilds the original pairing.
//!
//! For a dual field b the divisor D_μ(ν) = Σ_α μ^{2α} ν^α / M_{2α} tames the
//! growth of b_n, so a_n = b_n / D_μ(ν) is the coefficient field of a bounded
//! continuous function f. Pairing Σ_β (μ^{2β}/M_{2β}) N^β f against a test
//! field recovers Σ b_n φ_n because the inner sums reproduce D_μ(ν) term by
//! term. In several dimensions ν is the total order Σ n_k.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermite::{sup_norm_table, synthesize_grid, total_order, CoefficientField, FieldKind, SampledFunction};
use crate::spaces::{compensated_sum, parseval_pair};
use crate::weights::WeightSequence;
use crate::C64;

/// Relative size below which a divisor term counts as negligible.
pub const DIVISOR_TOL: f64 = 1e-18;
/// Relative size below which a β-term of the oscillator series counts as negligible.
pub const SERIES_TOL: f64 = 1e-12;
/// Consecutive negligible, decreasing terms required to stop.
pub const STOP_RUN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivisorEntry {
    pub log_value: f64,
    /// Linear value, +∞ when it overflows.
    pub value: f64,
    pub terms_used: usize,
    pub tail_flag: bool,
}

impl DivisorEntry {
    fn from_terms(terms: &[f64], tail_flag: bool) -> Self {
        let value = compensated_sum(terms.iter().map(|t| C64::new(t.exp(), 0.0))).re;
        let log_value = if value.is_finite() { value.ln() } else { log_sum(terms) };
        DivisorEntry { log_value, value, terms_used: terms.len(), tail_flag }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn log_sum(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + s.ln()
}

/// log of the β-th coefficient μ^{2β} ν^β / M_{2β}, with 0⁰ = 1.
fn log_series_coeff(seq: &WeightSequence, ln_mu: f64, nu: usize, beta: usize) -> Result<f64> {
    let ln_nu_pow = if beta == 0 {
        0.0
    } else if nu == 0 {
        return Ok(f64::NEG_INFINITY);
    } else {
        beta as f64 * (nu as f64).ln()
    };
    Ok(2.0 * beta as f64 * ln_mu + ln_nu_pow - seq.log_m(2 * beta as u64)?)
}

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(format!("mu must be positive, got {mu}")))
    }
}

/// D_μ(ν) in log form.
///
/// Summation stops once a term falls below [`DIVISOR_TOL`] times the partial
/// sum on [`STOP_RUN`] consecutive, decreasing terms. Terms are available up
/// to the largest α with 2α + 1 ≤ p_max; running into that cap sets
/// `tail_flag` when the terms were already decreasing and is an error
/// otherwise.
pub fn divisor(seq: &WeightSequence, mu: f64, nu: usize) -> Result<DivisorEntry> {
    check_mu(mu)?;
    if nu == 0 {
        return Ok(DivisorEntry::from_terms(&[0.0], false));
    }
    let ln_mu = mu.ln();
    let alpha_cap = ((seq.p_max() - 1) / 2) as usize;
    let mut terms = Vec::new();
    let mut partial = f64::NEG_INFINITY;
    let mut run = 0;
    for alpha in 0..=alpha_cap {
        let t = log_series_coeff(seq, ln_mu, nu, alpha)?;
        let decreasing = terms.last().is_some_and(|&prev| t < prev);
        terms.push(t);
        partial = log_add(partial, t);
        if decreasing && t < partial + DIVISOR_TOL.ln() {
            run += 1;
            if run == STOP_RUN {
                return Ok(DivisorEntry::from_terms(&terms, false));
            }
        } else {
            run = 0;
        }
    }
    let n = terms.len();
    if n >= 2 && terms[n - 1] < terms[n - 2] {
        Ok(DivisorEntry::from_terms(&terms, true))
    } else {
        Err(Error::PrefixExhausted(format!(
            "divisor terms still growing at alpha = {} for mu = {mu}, nu = {nu}",
            n - 1
        )))
    }
}

/// Divisor values for every total order ν ≤ `nu_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivisorEvaluation {
    pub mu: f64,
    pub entries: Vec<DivisorEntry>,
    pub tail_flag: bool,
}

impl DivisorEvaluation {
    pub fn new(seq: &WeightSequence, mu: f64, nu_max: usize) -> Result<Self> {
        check_mu(mu)?;
        let entries: Vec<DivisorEntry> = (0..=nu_max)
            .into_par_iter()
            .map(|nu| divisor(seq, mu, nu))
            .collect::<Result<_>>()?;
        let tail_flag = entries.iter().any(|e| e.tail_flag);
        Ok(DivisorEvaluation { mu, entries, tail_flag })
    }

    pub fn log_value(&self, n: &[usize]) -> f64 {
        self.entries[total_order(n)].log_value
    }

    pub fn entry(&self, n: &[usize]) -> &DivisorEntry {
        &self.entries[total_order(n)]
    }
}

fn nu_max(a: &CoefficientField) -> usize {
    a.shape().orders().iter().map(|o| o - 1).sum()
}

/// a_n = b_n / D_μ(ν). When D overflows the magnitude goes through log form
/// with the phase kept apart.
pub fn regularize(b: &CoefficientField, seq: &WeightSequence, mu: f64) -> Result<(CoefficientField, DivisorEvaluation)> {
    let div = DivisorEvaluation::new(seq, mu, nu_max(b))?;
    let data = b
        .iter()
        .map(|(n, z)| {
            let d = div.entry(&n).value;
            if d.is_finite() {
                return z / d;
            }
            let r = z.norm();
            if r == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let phase = z / r;
            phase * (r.ln() - div.log_value(&n)).exp()
        })
        .collect();
    let a = CoefficientField::new(b.shape().clone(), FieldKind::Test, data)?;
    Ok((a, div))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTable {
    pub sup: f64,
    pub argsup: usize,
    /// (n, n² |a_n| ‖H_n‖_∞) for 1 ≤ n ≤ up_to.
    pub rows: Vec<(usize, f64)>,
}

/// s_n = n² |a_n| ‖H_n‖_∞ for 1 ≤ n ≤ up_to on a one-dimensional field.
pub fn verify_bound(a: &CoefficientField, up_to: usize) -> Result<BoundTable> {
    if a.dim() != 1 {
        return Err(Error::DimensionMismatch(format!("bound table needs d = 1, got {}", a.dim())));
    }
    let sup_norms = sup_norm_table(up_to)?;
    let rows: Vec<(usize, f64)> = (1..=up_to)
        .map(|n| (n, (n as f64).powi(2) * a.get(&[n]).norm() * sup_norms[n]))
        .collect();
    let (argsup, sup) = rows
        .iter()
        .fold((0, 0.0), |acc, &(n, s)| if s > acc.1 { (n, s) } else { acc });
    Ok(BoundTable { sup, argsup, rows })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesPair {
    pub value: C64,
    /// Σ_n |c_{β,n} a_n φ_n| for the last β included.
    pub tail_estimate: f64,
    pub betas_used: usize,
    pub converged: bool,
}

/// Σ_n |coefficient · a_n φ_n| and the signed sum for one β, over the common box.
fn beta_term(
    a_f: &CoefficientField,
    phi: &CoefficientField,
    common: &crate::hermite::BoxShape,
    seq: &WeightSequence,
    ln_mu: f64,
    beta: usize,
) -> Result<(C64, f64)> {
    let mut abs = 0.0;
    let mut parts = Vec::with_capacity(common.len());
    for n in common.indices() {
        let c = log_series_coeff(seq, ln_mu, total_order(&n), beta)?;
        let z = a_f.get(&n) * phi.get(&n) * c.exp();
        abs += z.norm();
        parts.push(z);
    }
    Ok((compensated_sum(parts.into_iter()), abs))
}

/// Σ_{β ≤ beta_max} (μ^{2β}/M_{2β}) ⟨N^β f, φ⟩ evaluated spectrally. Stops
/// early once a β-term's absolute size is below [`SERIES_TOL`] times the
/// running absolute total on [`STOP_RUN`] consecutive, decreasing terms.
pub fn oscillator_series_pair(
    a_f: &CoefficientField,
    seq: &WeightSequence,
    mu: f64,
    phi: &CoefficientField,
    beta_max: usize,
) -> Result<SeriesPair> {
    check_mu(mu)?;
    let common = a_f.shape().intersect(phi.shape())?;
    let ln_mu = mu.ln();
    let mut sums = Vec::new();
    let (mut total_abs, mut last_abs, mut run) = (0.0, f64::INFINITY, 0);
    let mut converged = false;
    for beta in 0..=beta_max {
        let (z, abs) = beta_term(a_f, phi, &common, seq, ln_mu, beta)?;
        sums.push(z);
        total_abs += abs;
        let small = abs <= SERIES_TOL * total_abs;
        if small && (abs < last_abs || abs == 0.0) {
            run += 1;
        } else {
            run = 0;
        }
        last_abs = abs;
        if run == STOP_RUN || total_abs == 0.0 {
            converged = true;
            break;
        }
    }
    Ok(SeriesPair {
        betas_used: sums.len(),
        value: compensated_sum(sums.into_iter()),
        tail_estimate: last_abs,
        converged,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rearrangement {
    /// Σ_n Σ_β |(μ^{2β}/M_{2β}) a_n ν^β φ_n|.
    pub absolute_sum: f64,
    pub beta_outer: C64,
    pub n_outer: C64,
    pub gap: f64,
}

/// The double series of [`oscillator_series_pair`] over β ≤ beta_max summed
/// in both orders, with its absolute sum.
pub fn rearrangement_check(
    a_f: &CoefficientField,
    seq: &WeightSequence,
    mu: f64,
    phi: &CoefficientField,
    beta_max: usize,
) -> Result<Rearrangement> {
    check_mu(mu)?;
    let common = a_f.shape().intersect(phi.shape())?;
    let ln_mu = mu.ln();
    let mut absolute_sum = 0.0;
    let mut by_beta = Vec::with_capacity(beta_max + 1);
    for beta in 0..=beta_max {
        let (z, abs) = beta_term(a_f, phi, &common, seq, ln_mu, beta)?;
        absolute_sum += abs;
        by_beta.push(z);
    }
    let by_n: Vec<C64> = common
        .indices()
        .map(|n| {
            let nu = total_order(&n);
            let inner: Vec<C64> = (0..=beta_max)
                .map(|beta| Ok(a_f.get(&n) * phi.get(&n) * log_series_coeff(seq, ln_mu, nu, beta)?.exp()))
                .collect::<Result<_>>()?;
            Ok(compensated_sum(inner.into_iter()))
        })
        .collect::<Result<_>>()?;
    let beta_outer = compensated_sum(by_beta.into_iter());
    let n_outer = compensated_sum(by_n.into_iter());
    Ok(Rearrangement { absolute_sum, beta_outer, n_outer, gap: (beta_outer - n_outer).norm() })
}

/// Samples of f = Σ a_n H_n on a tensor grid.
pub fn synthesize_f(a: &CoefficientField, grids: &[Vec<f64>]) -> Result<SampledFunction> {
    synthesize_grid(a, grids)
}

/// Relative gap |lhs − rhs| / max(|lhs|, |rhs|), zero when both vanish.
pub fn relative_gap(lhs: C64, rhs: C64) -> f64 {
    let scale = lhs.norm().max(rhs.norm());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

/// Pairing of b with φ next to the oscillator-series reconstruction from
/// regularize(b).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundTrip {
    pub direct: C64,
    pub series: SeriesPair,
    pub relative_residual: f64,
}

pub fn round_trip(
    b: &CoefficientField,
    seq: &WeightSequence,
    mu: f64,
    phi: &CoefficientField,
    beta_max: usize,
) -> Result<RoundTrip> {
    let (a, _) = regularize(b, seq, mu)?;
    let series = oscillator_series_pair(&a, seq, mu, phi, beta_max)?;
    let direct = parseval_pair(b, phi)?;
    Ok(RoundTrip { relative_residual: relative_gap(series.value, direct), direct, series })
}
