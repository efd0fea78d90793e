//! Finite-prefix checks of the standard conditions on weight sequences.
//!
//! Every verdict refers to the checked prefix only. Asymptotic properties are
//! extrapolated from tail trends with a fixed band of ±[`TREND_BAND`]; inside
//! the band the report says `inconclusive`.

use serde::Serialize;

use super::sequence::WeightSequence;
use crate::error::{Error, Result};

/// Log-domain slack for (M.1).
pub const M1_TOL: f64 = 1e-12;
/// Half-width of the undecided band around trend thresholds.
pub const TREND_BAND: f64 = 0.05;
pub const MIN_PREFIX_M3: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    M1,
    M2,
    M3Quasi,
    M3Roumieu,
    M3Beurling,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::M1 => "M.1 logarithmic convexity",
            Condition::M2 => "M.2 stability under ultradifferential operators",
            Condition::M3Quasi => "M.3' non-quasianalyticity",
            Condition::M3Roumieu => "M.3'' nontriviality (Roumieu)",
            Condition::M3Beurling => "M.3''' nontriviality (Beurling)",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NontrivialMode {
    Roumieu,
    Beurling,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub checked_up_to: u64,
    pub witnesses: Vec<(String, f64)>,
    pub note: String,
}

impl ConditionReport {
    pub fn witness(&self, name: &str) -> Option<f64> {
        self.witnesses
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| *v)
    }
}

fn require_prefix(seq: &WeightSequence, min: u64) -> Result<&[f64]> {
    if seq.p_max() < min {
        return Err(Error::ParameterOutOfRange(format!(
            "condition check needs p_max >= {min}, sequence has {}",
            seq.p_max()
        )));
    }
    Ok(seq.log_table())
}

/// Least-squares slope of ys against xs.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// M_p² ≤ M_{p−1} M_{p+1}.
pub fn check_m1(seq: &WeightSequence) -> Result<ConditionReport> {
    let l = require_prefix(seq, 2)?;
    let p_max = l.len() - 1;
    let violations: Vec<usize> = (1..p_max)
        .filter(|&p| 2.0 * l[p] > l[p - 1] + l[p + 1] + M1_TOL)
        .collect();
    let mut witnesses = vec![("violations".to_string(), violations.len() as f64)];
    let verdict = match violations.first() {
        Some(&p) => {
            witnesses.push(("violating_index".into(), p as f64));
            witnesses.push((
                "excess".into(),
                2.0 * l[p] - l[p - 1] - l[p + 1],
            ));
            Verdict::Fails
        }
        None => Verdict::Holds,
    };
    Ok(ConditionReport {
        condition: Condition::M1,
        verdict,
        checked_up_to: p_max as u64,
        witnesses,
        note: format!("log-domain tolerance {M1_TOL:e}"),
    })
}

/// M_p ≤ A H^p min_q M_q M_{p−q}.
///
/// g(p) = log M_p − min_q (log M_q + log M_{p−q}); H = exp(max g(p)/p) and A
/// the smallest constant making the inequality hold on the prefix.
pub fn check_m2(seq: &WeightSequence) -> Result<ConditionReport> {
    let l = require_prefix(seq, 2)?;
    let p_max = l.len() - 1;
    let mut g = vec![0.0; p_max + 1];
    for p in 1..=p_max {
        let mut m = f64::INFINITY;
        for q in 0..=p {
            m = m.min(l[q] + l[p - q]);
        }
        g[p] = l[p] - m;
    }
    let (arg_h, log_h) = (1..=p_max)
        .map(|p| (p, g[p] / p as f64))
        .fold((1, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let log_h = log_h.max(0.0);
    let log_a = (0..=p_max)
        .map(|p| g[p] - p as f64 * log_h)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let holds_everywhere = (0..=p_max).all(|p| g[p] <= log_a + p as f64 * log_h + 1e-12);
    let mid = (p_max / 2).max(1);
    let ratio_growth = g[p_max] / p_max as f64 - g[mid] / mid as f64;
    let verdict = if !holds_everywhere {
        Verdict::Fails
    } else if ratio_growth > TREND_BAND {
        Verdict::Inconclusive
    } else {
        Verdict::Holds
    };
    let mut witnesses = vec![
        ("A".to_string(), log_a.exp()),
        ("H".to_string(), log_h.exp()),
        ("argmax_g_over_p".to_string(), arg_h as f64),
        ("g_over_p_growth_tail".to_string(), ratio_growth),
    ];
    if verdict == Verdict::Fails {
        let p = (0..=p_max)
            .find(|&p| g[p] > log_a + p as f64 * log_h + 1e-12)
            .unwrap_or(p_max);
        witnesses.push(("violating_index".into(), p as f64));
    }
    Ok(ConditionReport {
        condition: Condition::M2,
        verdict,
        checked_up_to: p_max as u64,
        witnesses,
        note: format!(
            "inconclusive when g(p)/p grows by more than {TREND_BAND} between p_max/2 and p_max"
        ),
    })
}

/// Σ M_{p−1}/M_p < ∞, judged from the tail decay of the ratios.
///
/// The ratio r_p is fitted as p^e over the last half of the prefix: e below
/// −1 − band converges, above −1 + band diverges. Inside the band a second
/// fit r_p ≈ p^{-1} (log p)^{-γ} decides with the same band around γ = 1.
pub fn check_m3_quasi(seq: &WeightSequence) -> Result<ConditionReport> {
    let l = require_prefix(seq, MIN_PREFIX_M3)?;
    let p_max = l.len() - 1;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for p in 1..=p_max {
        let y = (l[p - 1] - l[p]).exp() - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let start = (p_max / 2).max(2);
    let xs: Vec<f64> = (start..=p_max).map(|p| (p as f64).ln()).collect();
    let ys: Vec<f64> = (start..=p_max).map(|p| l[p - 1] - l[p]).collect();
    let exponent = slope(&xs, &ys);
    let mut witnesses = vec![
        ("partial_sum".to_string(), sum),
        ("fitted_exponent".to_string(), exponent),
    ];
    let verdict = if exponent < -1.0 - TREND_BAND {
        Verdict::Holds
    } else if exponent > -1.0 + TREND_BAND {
        Verdict::Fails
    } else {
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().zip(&xs).map(|(y, x)| y + x).collect();
        let gamma = -slope(&lx, &ly);
        witnesses.push(("fitted_log_exponent".into(), gamma));
        if gamma < 1.0 - TREND_BAND {
            Verdict::Fails
        } else if gamma > 1.0 + TREND_BAND {
            Verdict::Holds
        } else {
            Verdict::Inconclusive
        }
    };
    if verdict == Verdict::Fails {
        witnesses.push(("violating_index".into(), start as f64));
    }
    Ok(ConditionReport {
        condition: Condition::M3Quasi,
        verdict,
        checked_up_to: p_max as u64,
        witnesses,
        note: format!(
            "tail fit over p in [{start}, {p_max}], thresholds -1 ± {TREND_BAND}; fails means quasianalytic"
        ),
    })
}

/// p^{p/2} ≤ C L^p M_p for some L (Roumieu) or for every L (Beurling).
///
/// With q_p = ((p/2) log p − log M_p)/p, Roumieu needs q bounded above and
/// Beurling needs q → −∞. Both are read off the slope of q against log p over
/// the last half of the prefix.
pub fn check_m3_nontrivial(seq: &WeightSequence, mode: NontrivialMode) -> Result<ConditionReport> {
    let l = require_prefix(seq, MIN_PREFIX_M3)?;
    let p_max = l.len() - 1;
    let excess = |p: usize| -> f64 {
        let x = p as f64;
        if p == 0 {
            0.0
        } else {
            0.5 * x * x.ln() - l[p]
        }
    };
    let q: Vec<f64> = (0..=p_max)
        .map(|p| if p == 0 { f64::NEG_INFINITY } else { excess(p) / p as f64 })
        .collect();
    let log_l = q[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_c = (0..=p_max)
        .map(|p| excess(p) - p as f64 * log_l)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    let start = (p_max / 2).max(2);
    let xs: Vec<f64> = (start..=p_max).map(|p| (p as f64).ln()).collect();
    let tail_slope = slope(&xs, &q[start..=p_max]);
    let tail_argmax = (start..=p_max)
        .max_by(|&a, &b| q[a].total_cmp(&q[b]))
        .unwrap_or(p_max);
    let (condition, verdict) = match mode {
        NontrivialMode::Roumieu => (
            Condition::M3Roumieu,
            if tail_slope <= TREND_BAND {
                Verdict::Holds
            } else {
                Verdict::Fails
            },
        ),
        NontrivialMode::Beurling => (
            Condition::M3Beurling,
            if tail_slope < -TREND_BAND {
                Verdict::Holds
            } else if tail_slope >= 0.0 {
                Verdict::Fails
            } else {
                Verdict::Inconclusive
            },
        ),
    };
    let mut witnesses = vec![
        ("C".to_string(), log_c.exp()),
        ("L".to_string(), log_l.exp()),
        ("tail_slope".to_string(), tail_slope),
    ];
    if verdict == Verdict::Fails {
        witnesses.push(("violating_index".into(), tail_argmax as f64));
    }
    let note = match mode {
        NontrivialMode::Roumieu => format!(
            "C, L fitted on the prefix; fails if q_p grows with slope > {TREND_BAND} in log p"
        ),
        NontrivialMode::Beurling => format!(
            "every-L quantifier judged by trend: holds if q_p falls with slope < -{TREND_BAND} in log p, fails if it does not fall"
        ),
    };
    Ok(ConditionReport {
        condition,
        verdict,
        checked_up_to: p_max as u64,
        witnesses,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::sequence::{make_sequence, Family};

    fn seq(f: Family, p: u64) -> WeightSequence {
        make_sequence(f, p).unwrap()
    }

    #[test]
    fn m1_examples() {
        let r = check_m1(&seq(Family::Gevrey { alpha: 1.0 }, 1000)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let r = check_m1(&seq(Family::ExpPower { r: 2.0 }, 1000)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);

        // 10² ≤ 1·50 and 50² ≤ 10·100 both fail.
        let bad = WeightSequence::custom_from_values(&[1.0, 10.0, 50.0, 100.0]).unwrap();
        let r = check_m1(&bad).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(r.witness("violating_index"), Some(1.0));
        assert_eq!(r.witness("violations"), Some(2.0));

        let flat = WeightSequence::custom_from_values(&[1.0, 10.0, 10.0, 10.0]).unwrap();
        assert_eq!(check_m1(&flat).unwrap().verdict, Verdict::Fails);
    }

    #[test]
    fn exp_power_second_difference_is_two() {
        let s = seq(Family::ExpPower { r: 2.0 }, 50);
        let l = s.log_table();
        for p in 1..50 {
            assert!((l[p - 1] + l[p + 1] - 2.0 * l[p] - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn m2_gevrey() {
        let r = check_m2(&seq(Family::Gevrey { alpha: 1.0 }, 400)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.witness("H").unwrap() <= 2.0);
        assert_eq!(r.witness("A"), Some(1.0));
        // direct re-check of the fitted constants
        let s = seq(Family::Gevrey { alpha: 1.0 }, 400);
        let l = s.log_table();
        let (la, lh) = (r.witness("A").unwrap().ln(), r.witness("H").unwrap().ln());
        for p in 0..=400usize {
            for q in 0..=p {
                assert!(l[p] <= la + p as f64 * lh + l[q] + l[p - q] + 1e-9);
            }
        }
        let r = check_m2(&seq(Family::Gevrey { alpha: 0.5 }, 400)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn m2_p_to_the_p_prefix() {
        let logs: Vec<f64> = (0..=300u32)
            .map(|p| if p == 0 { 0.0 } else { p as f64 * (p as f64).ln() })
            .collect();
        let r = check_m2(&WeightSequence::custom_from_logs(logs).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.witness("H").unwrap().is_finite());
    }

    #[test]
    fn m2_exp_power_is_not_settled() {
        let r = check_m2(&seq(Family::ExpPower { r: 2.0 }, 200)).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn m3_quasi_examples() {
        let r = check_m3_quasi(&seq(Family::Gevrey { alpha: 2.0 }, 10_000)).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((r.witness("partial_sum").unwrap() - zeta2).abs() < 1e-2);

        let r = check_m3_quasi(&seq(Family::Gevrey { alpha: 1.0 }, 1000)).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.witness("violating_index").is_some());

        let r = check_m3_quasi(&seq(Family::PowerLog { s: 0.5, t: 1.0 }, 1000)).unwrap();
        assert!(r.witness("fitted_exponent").is_some());
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn m3_nontrivial_examples() {
        let logs: Vec<f64> = (0..=64u32)
            .map(|p| if p == 0 { 0.0 } else { 0.5 * p as f64 * (p as f64).ln() })
            .collect();
        let half = WeightSequence::custom_from_logs(logs).unwrap();
        let r = check_m3_nontrivial(&half, NontrivialMode::Roumieu).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.witness("C"), Some(1.0));
        assert_eq!(r.witness("L"), Some(1.0));

        let g1 = seq(Family::Gevrey { alpha: 1.0 }, 1000);
        assert_eq!(
            check_m3_nontrivial(&g1, NontrivialMode::Roumieu).unwrap().verdict,
            Verdict::Holds
        );
        let gh = seq(Family::Gevrey { alpha: 0.5 }, 1000);
        let r = check_m3_nontrivial(&gh, NontrivialMode::Beurling).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!(r.witness("violating_index").is_some());
        let pl = seq(Family::PowerLog { s: 0.5, t: 1.0 }, 1000);
        assert_eq!(
            check_m3_nontrivial(&pl, NontrivialMode::Beurling).unwrap().verdict,
            Verdict::Holds
        );
    }

    #[test]
    fn m3_prefix_precondition() {
        let s = seq(Family::Gevrey { alpha: 1.0 }, 8);
        assert!(check_m3_quasi(&s).is_err());
        assert!(check_m3_nontrivial(&s, NontrivialMode::Roumieu).is_err());
    }
}
