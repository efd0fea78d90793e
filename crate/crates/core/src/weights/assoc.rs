use std::collections::HashMap;
use std::sync::RwLock;

use serde::Serialize;

use super::sequence::WeightSequence;
use crate::error::{Error, Result};

pub const DEFAULT_P_CAP: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssocOptions {
    /// Largest index the scan may visit.
    pub p_cap: u64,
    /// Scan every index instead of stopping at the first strict decrease.
    /// Needed for sequences that are not log-convex.
    pub full_scan: bool,
}

impl Default for AssocOptions {
    fn default() -> Self {
        AssocOptions {
            p_cap: DEFAULT_P_CAP,
            full_scan: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AssocValue {
    pub value: f64,
    pub p_star: u64,
    /// The maximum sits at the scan cap; the true supremum may be larger.
    pub saturated: bool,
}

fn effective_cap(seq: &WeightSequence, p_cap: u64) -> u64 {
    if seq.extends_beyond_prefix() {
        p_cap
    } else {
        p_cap.min(seq.p_max())
    }
}

/// M(ρ) = sup_p (p log ρ − log M_p).
///
/// Under log-convexity p ↦ p log ρ − log M_p is concave, so the ascending
/// scan can stop once the objective stops increasing; that index (the
/// smallest maximizer) is located by galloping plus bisection.
pub fn associated_fn(seq: &WeightSequence, rho: f64, opts: AssocOptions) -> Result<AssocValue> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "rho must be positive and finite, got {rho}"
        )));
    }
    let cap = effective_cap(seq, opts.p_cap);
    let lr = rho.ln();
    let f = |p: u64| -> Result<f64> { Ok(p as f64 * lr - seq.log_m(p)?) };
    if opts.full_scan {
        return brute_force(seq, rho, cap);
    }
    // decreases(p): f(p + 1) <= f(p); false..false true..true under (M.1).
    let decreases = |p: u64| -> Result<bool> { Ok(f(p + 1)? <= f(p)?) };
    if cap == 0 {
        return Ok(AssocValue {
            value: 0.0,
            p_star: 0,
            saturated: true,
        });
    }
    if decreases(0)? {
        return Ok(AssocValue {
            value: 0.0,
            p_star: 0,
            saturated: false,
        });
    }
    // invariant: decreases(lo) == false
    let mut lo = 0u64;
    let mut step = 1u64;
    let hi = loop {
        let cand = lo.saturating_add(step);
        if cand >= cap {
            break cap;
        }
        if decreases(cand)? {
            break cand;
        }
        lo = cand;
        step = step.saturating_mul(2);
    };
    if hi == cap {
        // search the remaining window (lo, cap - 1]
        if cap - 1 > lo && decreases(cap - 1)? {
            let p = bisect(lo, cap - 1, &decreases)?;
            return Ok(AssocValue {
                value: f(p)?,
                p_star: p,
                saturated: false,
            });
        }
        return Ok(AssocValue {
            value: f(cap)?,
            p_star: cap,
            saturated: true,
        });
    }
    let p = bisect(lo, hi, &decreases)?;
    Ok(AssocValue {
        value: f(p)?,
        p_star: p,
        saturated: false,
    })
}

/// Smallest p in (lo, hi] with `pred(p)`, given pred(lo) false and pred(hi) true.
fn bisect(mut lo: u64, mut hi: u64, pred: &dyn Fn(u64) -> Result<bool>) -> Result<u64> {
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Maximum over every 0 ≤ p ≤ cap with no early termination; ties resolve to
/// the smallest index.
pub fn brute_force(seq: &WeightSequence, rho: f64, cap: u64) -> Result<AssocValue> {
    let lr = rho.ln();
    let mut best = (0u64, 0.0f64);
    for p in 1..=cap {
        let v = p as f64 * lr - seq.log_m(p)?;
        if v > best.1 {
            best = (p, v);
        }
    }
    Ok(AssocValue {
        value: best.1,
        p_star: best.0,
        saturated: best.0 == cap,
    })
}

/// Memoized M(ρ) for one sequence. Entries are written once per ρ and may be
/// read concurrently.
#[derive(Debug)]
pub struct AssociatedFunctionTable {
    seq: WeightSequence,
    opts: AssocOptions,
    entries: RwLock<HashMap<u64, AssocValue>>,
}

impl AssociatedFunctionTable {
    pub fn new(seq: &WeightSequence, opts: AssocOptions) -> Self {
        AssociatedFunctionTable {
            seq: seq.clone(),
            opts,
            entries: RwLock::new(HashMap::new()),
        }
    }

    pub fn sequence(&self) -> &WeightSequence {
        &self.seq
    }

    pub fn options(&self) -> AssocOptions {
        self.opts
    }

    /// M(ρ) with p*; ρ = 0 is accepted and gives M = 0 at p* = 0.
    pub fn get(&self, rho: f64) -> Result<AssocValue> {
        if rho == 0.0 {
            return Ok(AssocValue {
                value: 0.0,
                p_star: 0,
                saturated: false,
            });
        }
        let key = rho.to_bits();
        if let Some(v) = self.entries.read().expect("memo lock").get(&key) {
            return Ok(*v);
        }
        let v = associated_fn(&self.seq, rho, self.opts)?;
        self.entries
            .write()
            .expect("memo lock")
            .entry(key)
            .or_insert(v);
        Ok(v)
    }

    /// M(ρ), failing if the scan saturated.
    pub fn value(&self, rho: f64) -> Result<f64> {
        let v = self.get(rho)?;
        if v.saturated {
            return Err(Error::Saturated(format!(
                "M({rho}) reached p_cap = {}",
                self.opts.p_cap
            )));
        }
        Ok(v.value)
    }

    /// Σ_k M(θ_k √n_k).
    pub fn log_weight(&self, theta: &[f64], n: &[usize]) -> Result<f64> {
        log_weight(self, theta, n)
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Σ_k M(θ_k √n_k) over the axes of a multi-index.
pub fn log_weight(table: &AssociatedFunctionTable, theta: &[f64], n: &[usize]) -> Result<f64> {
    if theta.len() != n.len() {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} components, multi-index has {}",
            theta.len(),
            n.len()
        )));
    }
    let mut total = 0.0;
    for (&th, &nk) in theta.iter().zip(n) {
        if !(th.is_finite() && th > 0.0) {
            return Err(Error::ParameterOutOfRange(format!(
                "theta components must be positive, got {th}"
            )));
        }
        if nk == 0 {
            continue;
        }
        total += table.value(th * (nk as f64).sqrt())?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::sequence::{make_sequence, Family};

    fn gevrey1() -> WeightSequence {
        make_sequence(Family::Gevrey { alpha: 1.0 }, 200).unwrap()
    }

    #[test]
    fn m_of_one_is_zero_for_factorials() {
        let v = associated_fn(&gevrey1(), 1.0, AssocOptions::default()).unwrap();
        assert_eq!(v.value, 0.0);
        assert_eq!(v.p_star, 0);
        assert!(!v.saturated);
    }

    #[test]
    fn m_of_e_for_p_to_the_p() {
        let seq = make_sequence(Family::PowerLog { s: 1.0, t: 0.0 }, 50).unwrap();
        let e = std::f64::consts::E;
        let v = associated_fn(&seq, e, AssocOptions::default()).unwrap();
        // brute force over p of p - p log p: p = 1 gives 1, p = 2 gives 2 - 2 log 2.
        let mut oracle = (0u64, 0.0f64);
        for p in 1..=50u64 {
            let x = p as f64;
            let val = x - x * x.ln();
            if val > oracle.1 {
                oracle = (p, val);
            }
        }
        assert_eq!(oracle.0, 1);
        assert_eq!(v.p_star, 1);
        assert!((v.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn saturation_is_flagged() {
        let seq = gevrey1();
        let v = associated_fn(
            &seq,
            1e6,
            AssocOptions {
                p_cap: 100,
                full_scan: false,
            },
        )
        .unwrap();
        assert!(v.saturated);
        assert_eq!(v.p_star, 100);
        let t = AssociatedFunctionTable::new(
            &seq,
            AssocOptions {
                p_cap: 100,
                full_scan: false,
            },
        );
        assert!(matches!(t.value(1e6), Err(Error::Saturated(_))));
    }

    #[test]
    fn custom_cap_is_the_prefix() {
        let seq = WeightSequence::custom_from_values(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        let v = associated_fn(&seq, 2.0, AssocOptions::default()).unwrap();
        assert!(v.saturated);
        assert_eq!(v.p_star, 3);
    }

    #[test]
    fn log_weight_basics() {
        let seq = gevrey1();
        let t = AssociatedFunctionTable::new(&seq, AssocOptions::default());
        assert_eq!(t.log_weight(&[1.0, 2.0], &[0, 0]).unwrap(), 0.0);
        let n = 7usize;
        let theta = std::f64::consts::E / (n as f64).sqrt();
        let v = t.log_weight(&[theta], &[n]).unwrap();
        let direct = associated_fn(&seq, theta * (n as f64).sqrt(), AssocOptions::default())
            .unwrap()
            .value;
        assert_eq!(v, direct);
        // M(e) for factorials: max of p - log p! is at p = 2.
        assert!((v - (2.0 - 2f64.ln())).abs() < 1e-14);
        let a = t.log_weight(&[0.7], &[5]).unwrap();
        let b = t.log_weight(&[1.3], &[9]).unwrap();
        assert_eq!(t.log_weight(&[0.7, 1.3], &[5, 9]).unwrap(), a + b);
        assert!(t.log_weight(&[1.0], &[1, 2]).is_err());
    }

    #[test]
    fn rejects_bad_rho() {
        assert!(associated_fn(&gevrey1(), 0.0, AssocOptions::default()).is_err());
        assert!(associated_fn(&gevrey1(), f64::NAN, AssocOptions::default()).is_err());
    }
}
