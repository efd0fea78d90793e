use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight function ω used to generate a sequence via M_p = sup_ρ ρ^p e^{-ω(ρ)}.
///
/// The optional domain restricts the supremum scan; tabulated weights only
/// know ω between their first and last abscissa.
#[derive(Clone)]
pub struct WeightFn {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    domain: Option<(f64, f64)>,
    label: String,
}

impl WeightFn {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WeightFn {
            eval: Arc::new(f),
            domain: None,
            label: label.into(),
        }
    }

    /// Piecewise-linear interpolation of ω in log ρ through the given
    /// `(rho, omega)` points.
    pub fn from_table(points: &[[f64; 2]]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::ParameterOutOfRange(
                "weight table needs at least two points".into(),
            ));
        }
        let mut xs = Vec::with_capacity(points.len());
        let mut ys = Vec::with_capacity(points.len());
        for (i, &[rho, omega]) in points.iter().enumerate() {
            if !rho.is_finite() || !omega.is_finite() {
                return Err(Error::NonFinite(format!("weight table entry {i}")));
            }
            if rho <= 0.0 {
                return Err(Error::ParameterOutOfRange(format!(
                    "weight table rho must be positive (entry {i})"
                )));
            }
            if omega < 0.0 {
                return Err(Error::ParameterOutOfRange(format!(
                    "weight table omega must be nonnegative (entry {i})"
                )));
            }
            let u = rho.ln();
            if let (Some(&pu), Some(&pw)) = (xs.last(), ys.last()) {
                if u <= pu {
                    return Err(Error::ParameterOutOfRange(format!(
                        "weight table rho must be strictly increasing (entry {i})"
                    )));
                }
                if omega < pw {
                    return Err(Error::ParameterOutOfRange(format!(
                        "weight table omega must be nondecreasing (entry {i})"
                    )));
                }
            }
            xs.push(u);
            ys.push(omega);
        }
        let lo = points[0][0];
        let hi = points[points.len() - 1][0];
        let eval = move |rho: f64| -> f64 {
            let u = rho.ln();
            if !(u >= xs[0] && u <= xs[xs.len() - 1]) {
                return f64::NAN;
            }
            let j = xs.partition_point(|&x| x <= u).clamp(1, xs.len() - 1);
            let (x0, x1) = (xs[j - 1], xs[j]);
            let w = (u - x0) / (x1 - x0);
            ys[j - 1] * (1.0 - w) + ys[j] * w
        };
        Ok(WeightFn {
            eval: Arc::new(eval),
            domain: Some((lo, hi)),
            label: format!("table[{}]", points.len()),
        })
    }

    pub fn eval(&self, rho: f64) -> f64 {
        (self.eval)(rho)
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFn")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    /// M_p = (p!)^alpha
    Gevrey { alpha: f64 },
    /// M_p = p^{sp} (log p)^{tp}, with the log factor clamped below by 1.
    PowerLog { s: f64, t: f64 },
    /// M_p = e^{p^r}
    ExpPower { r: f64 },
    /// M_p = sup_ρ ρ^p e^{-ω(ρ)}
    FromWeightFn(WeightFn),
    /// Finite table of log M_p; never extrapolated.
    Custom(Vec<f64>),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gevrey { .. } => "gevrey",
            Family::PowerLog { .. } => "power_log",
            Family::ExpPower { .. } => "exp_power",
            Family::FromWeightFn(_) => "from_weight_fn",
            Family::Custom(_) => "custom",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Family::Gevrey { alpha } => format!("gevrey(alpha={alpha})"),
            Family::PowerLog { s, t } => format!("power_log(s={s}, t={t})"),
            Family::ExpPower { r } => format!("exp_power(r={r})"),
            Family::FromWeightFn(w) => format!("from_weight_fn({})", w.label()),
            Family::Custom(v) => format!("custom(len={})", v.len()),
        }
    }
}

/// A positive weight sequence with M_0 = 1, held in log domain.
#[derive(Clone, Debug)]
pub struct WeightSequence {
    family: Family,
    log_m: Vec<f64>,
}

/// Build a weight sequence and materialize log M_p for 0 ≤ p ≤ p_max.
pub fn make_sequence(family: Family, p_max: u64) -> Result<WeightSequence> {
    if p_max < 2 {
        return Err(Error::ParameterOutOfRange(format!(
            "p_max must be at least 2, got {p_max}"
        )));
    }
    match &family {
        Family::Gevrey { alpha } => {
            if !(alpha.is_finite() && *alpha > 0.0) {
                return Err(Error::ParameterOutOfRange(format!(
                    "gevrey alpha must be positive, got {alpha}"
                )));
            }
        }
        Family::PowerLog { s, t } => {
            if !(s.is_finite() && *s >= 0.5) {
                return Err(Error::ParameterOutOfRange(format!(
                    "power_log s must be >= 1/2, got {s}"
                )));
            }
            if !(t.is_finite() && *t >= 0.0) {
                return Err(Error::ParameterOutOfRange(format!(
                    "power_log t must be >= 0, got {t}"
                )));
            }
        }
        Family::ExpPower { r } => {
            if !(r.is_finite() && *r > 1.0 && *r <= 2.0) {
                return Err(Error::ParameterOutOfRange(format!(
                    "exp_power r must lie in (1, 2], got {r}"
                )));
            }
        }
        Family::FromWeightFn(_) => {}
        Family::Custom(table) => {
            if table.len() < 3 {
                return Err(Error::ParameterOutOfRange(
                    "custom table needs at least three entries".into(),
                ));
            }
            if (table.len() as u64) <= p_max {
                return Err(Error::BeyondPrefix {
                    index: p_max,
                    p_max: table.len() as u64 - 1,
                });
            }
            if let Some(i) = table.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("custom log M_{i}")));
            }
            if table[0] != 0.0 {
                return Err(Error::ParameterOutOfRange(format!(
                    "custom sequence must have M_0 = 1 (log M_0 = {})",
                    table[0]
                )));
            }
        }
    }
    let cap = usize::try_from(p_max)
        .ok()
        .filter(|&c| c < (1 << 26))
        .ok_or_else(|| Error::ParameterOutOfRange(format!("p_max {p_max} too large")))?;
    let log_m = match &family {
        Family::Custom(table) => table[..=cap].to_vec(),
        Family::FromWeightFn(w) => {
            let mut out = Vec::with_capacity(cap + 1);
            out.push(0.0);
            for p in 1..=cap as u64 {
                out.push(sup_log_weight(w, p)?);
            }
            out
        }
        _ => (0..=cap as u64).map(|p| closed_form(&family, p)).collect(),
    };
    Ok(WeightSequence { family, log_m })
}

impl WeightSequence {
    /// Sequence given by its linear values M_0, M_1, ... (M_0 must be 1).
    pub fn custom_from_values(values: &[f64]) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::ParameterOutOfRange(format!(
                "custom value M_{i} must be positive and finite"
            )));
        }
        let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        Self::custom_from_logs(logs)
    }

    pub fn custom_from_logs(log_values: Vec<f64>) -> Result<Self> {
        let p_max = log_values.len().saturating_sub(1) as u64;
        make_sequence(Family::Custom(log_values), p_max)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn p_max(&self) -> u64 {
        self.log_m.len() as u64 - 1
    }

    /// Whether indices above `p_max` can be evaluated.
    pub fn extends_beyond_prefix(&self) -> bool {
        !matches!(self.family, Family::Custom(_))
    }

    pub fn log_table(&self) -> &[f64] {
        &self.log_m
    }

    /// log M_p. Closed-form and weight-function families are evaluated past
    /// the materialized prefix; custom tables are not.
    pub fn log_m(&self, p: u64) -> Result<f64> {
        if let Some(v) = usize::try_from(p).ok().and_then(|i| self.log_m.get(i)) {
            return Ok(*v);
        }
        match &self.family {
            Family::Custom(_) => Err(Error::BeyondPrefix {
                index: p,
                p_max: self.p_max(),
            }),
            Family::FromWeightFn(w) => sup_log_weight(w, p),
            f => Ok(closed_form(f, p)),
        }
    }
}

fn closed_form(family: &Family, p: u64) -> f64 {
    if p == 0 {
        return 0.0;
    }
    let x = p as f64;
    match family {
        Family::Gevrey { alpha } => alpha * ln_factorial(p),
        Family::PowerLog { s, t } => {
            let lf = x.ln().max(1.0);
            s * x * x.ln() + t * x * lf.ln()
        }
        Family::ExpPower { r } => x.powf(*r),
        Family::FromWeightFn(_) | Family::Custom(_) => unreachable!("not a closed form"),
    }
}

/// ln p!, exact summation below 256 and a Stirling series above.
pub fn ln_factorial(p: u64) -> f64 {
    static SMALL: OnceLock<Vec<f64>> = OnceLock::new();
    let small = SMALL.get_or_init(|| {
        let mut out = Vec::with_capacity(256);
        let mut acc = 0.0f64;
        let mut comp = 0.0f64;
        out.push(0.0);
        for k in 1..256u32 {
            let y = f64::from(k).ln() - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
            out.push(acc);
        }
        out
    });
    if p < 256 {
        return small[p as usize];
    }
    let z = p as f64 + 1.0;
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

const SUP_GRID: usize = 4097;
const SUP_EXPANSIONS: usize = 16;
const SUP_ZOOMS: usize = 80;
const U_LIMIT: f64 = 700.0;

/// sup over ρ > 0 of p·log ρ − ω(ρ), scanned on a geometric ρ grid and
/// refined around the maximizer.
fn sup_log_weight(w: &WeightFn, p: u64) -> Result<f64> {
    let pf = p as f64;
    let (dom_lo, dom_hi) = match w.domain() {
        Some((a, b)) => (a.ln(), b.ln()),
        None => (-U_LIMIT, U_LIMIT),
    };
    let g = |u: f64| -> Result<f64> {
        let om = w.eval(u.exp());
        if !om.is_finite() {
            return Err(Error::NonFinite(format!(
                "omega({}) = {om} in {}",
                u.exp(),
                w.label()
            )));
        }
        Ok(pf * u - om)
    };
    let scan = |lo: f64, hi: f64, n: usize| -> Result<(usize, f64, f64)> {
        let step = (hi - lo) / (n - 1) as f64;
        let mut best = (0usize, f64::NEG_INFINITY);
        for i in 0..n {
            let v = g(lo + step * i as f64)?;
            if v > best.1 {
                best = (i, v);
            }
        }
        Ok((best.0, best.1, step))
    };

    let mut lo = (-20.0f64).max(dom_lo);
    let mut hi = 40.0f64.min(dom_hi);
    if hi <= lo {
        lo = dom_lo;
        hi = dom_hi;
    }
    let mut found = None;
    for _ in 0..SUP_EXPANSIONS {
        let (i, v, step) = scan(lo, hi, SUP_GRID)?;
        let width = hi - lo;
        if i == 0 && lo > dom_lo {
            lo = (lo - width).max(dom_lo);
            continue;
        }
        if i == SUP_GRID - 1 && hi < dom_hi {
            hi = (hi + width).min(dom_hi);
            continue;
        }
        if i == 0 || i == SUP_GRID - 1 {
            return Err(Error::Saturated(format!(
                "sup of p log rho - omega for p = {p} sits at the edge of the scan domain of {}",
                w.label()
            )));
        }
        found = Some((lo + step * i as f64, v, step));
        break;
    }
    let (mut center, mut best, mut step) = found.ok_or_else(|| {
        Error::Saturated(format!(
            "maximizer for p = {p} not bracketed after {SUP_EXPANSIONS} expansions ({})",
            w.label()
        ))
    })?;
    for _ in 0..SUP_ZOOMS {
        let a = center - step;
        let b = center + step;
        let (i, v, s) = scan(a, b, 65)?;
        center = a + s * i as f64;
        best = best.max(v);
        step = s;
        if step < 1e-12 * center.abs().max(1.0) {
            break;
        }
    }
    Ok(best)
}

/// JSON sequence specification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    #[serde(flatten)]
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum FamilySpec {
    Gevrey {
        alpha: f64,
    },
    PowerLog {
        s: f64,
        t: f64,
    },
    ExpPower {
        r: f64,
    },
    FromWeightTable {
        omega: Vec<[f64; 2]>,
    },
    Custom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        log_values: Option<Vec<f64>>,
    },
}

/// Default prefix length when a spec omits `p_max`.
pub const DEFAULT_P_MAX: u64 = 1000;
const MAX_P_MAX: u64 = 1 << 20;

impl SequenceSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("sequence spec serializes")
    }

    pub fn build(&self) -> Result<WeightSequence> {
        if let Some(p) = self.p_max {
            if p > MAX_P_MAX {
                return Err(Error::ParameterOutOfRange(format!(
                    "p_max {p} exceeds {MAX_P_MAX}"
                )));
            }
        }
        let p_max = self.p_max.unwrap_or(DEFAULT_P_MAX);
        match &self.family {
            FamilySpec::Gevrey { alpha } => make_sequence(Family::Gevrey { alpha: *alpha }, p_max),
            FamilySpec::PowerLog { s, t } => {
                make_sequence(Family::PowerLog { s: *s, t: *t }, p_max)
            }
            FamilySpec::ExpPower { r } => make_sequence(Family::ExpPower { r: *r }, p_max),
            FamilySpec::FromWeightTable { omega } => {
                make_sequence(Family::FromWeightFn(WeightFn::from_table(omega)?), p_max)
            }
            FamilySpec::Custom { values, log_values } => {
                let logs = match (values, log_values) {
                    (Some(v), None) => {
                        if let Some(i) = v.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
                            return Err(Error::ParameterOutOfRange(format!(
                                "custom value M_{i} must be positive and finite"
                            )));
                        }
                        v.iter().map(|x| x.ln()).collect::<Vec<_>>()
                    }
                    (None, Some(l)) => l.clone(),
                    _ => {
                        return Err(Error::Malformed(
                            "custom params need exactly one of `values` or `log_values`".into(),
                        ))
                    }
                };
                if logs.len() as u64 > MAX_P_MAX + 1 {
                    return Err(Error::ParameterOutOfRange("custom table too long".into()));
                }
                let p_max = match self.p_max {
                    Some(p) => p,
                    None => logs.len().saturating_sub(1) as u64,
                };
                make_sequence(Family::Custom(logs), p_max)
            }
        }
    }
}
