//! Parsers for the small textual arguments: ranges `a:b:n`, comma lists,
//! box sizes, per-axis grids and θ grids.

use crate::error::{Error, Result};
use crate::hermite::{linspace, BoxShape};

/// Largest point count a range may request.
pub const MAX_RANGE_POINTS: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Range {
    pub fn points(&self) -> Vec<f64> {
        linspace(self.start, self.end, self.count)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("not a number: {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Malformed(format!("not finite: {s:?}")))
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("not a count: {s:?}")))
}

/// `a:b:n` with n ≥ 1 points, a < b unless n = 1.
pub fn parse_range(s: &str) -> Result<Range> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(Error::Malformed(format!("expected a:b:n, got {s:?}")));
    };
    let (start, end, count) = (parse_f64(a)?, parse_f64(b)?, parse_usize(n)?);
    if count == 0 || count > MAX_RANGE_POINTS {
        return Err(Error::ParameterOutOfRange(format!(
            "range needs 1..={MAX_RANGE_POINTS} points, got {count}"
        )));
    }
    if count > 1 && !(start < end) {
        return Err(Error::ParameterOutOfRange(format!("range start {start} must be below end {end}")));
    }
    Ok(Range { start, end, count })
}

/// Comma-separated finite reals.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Err(Error::Malformed("empty list".into()));
    }
    s.split(',').map(parse_f64).collect()
}

/// Comma-separated box orders, e.g. `32` or `16,16`.
pub fn parse_box(s: &str) -> Result<BoxShape> {
    let orders = s.split(',').map(parse_usize).collect::<Result<Vec<_>>>()?;
    BoxShape::new(orders)
}

/// One range per axis separated by `;`, or a single range used on every axis.
pub fn parse_grid(s: &str, dim: usize) -> Result<Vec<Vec<f64>>> {
    let ranges = s.split(';').map(parse_range).collect::<Result<Vec<_>>>()?;
    let total: usize = ranges.iter().map(|r| r.count).product();
    let total = if ranges.len() == 1 { ranges[0].count.saturating_pow(dim as u32) } else { total };
    if total > MAX_RANGE_POINTS {
        return Err(Error::ParameterOutOfRange(format!("grid has {total} points")));
    }
    match ranges.len() {
        1 => Ok(vec![ranges[0].points(); dim]),
        k if k == dim => Ok(ranges.iter().map(Range::points).collect()),
        k => Err(Error::DimensionMismatch(format!("{k} grid axes for a {dim}-d field"))),
    }
}

/// θ probes as a range `a:b:n` or a list `t1,t2,…`, each scalar used on every
/// axis. Values must be positive.
pub fn parse_theta_grid(s: &str, dim: usize) -> Result<Vec<Vec<f64>>> {
    let values = if s.contains(':') { parse_range(s)?.points() } else { parse_f64_list(s)? };
    if let Some(v) = values.iter().find(|v| **v <= 0.0) {
        return Err(Error::ParameterOutOfRange(format!("theta must be positive, got {v}")));
    }
    Ok(values.into_iter().map(|v| vec![v; dim]).collect())
}

/// A θ vector with one entry per axis, or a single entry used on every axis.
pub fn parse_theta(s: &str, dim: usize) -> Result<Vec<f64>> {
    let values = parse_f64_list(s)?;
    if let Some(v) = values.iter().find(|v| **v <= 0.0) {
        return Err(Error::ParameterOutOfRange(format!("theta must be positive, got {v}")));
    }
    match values.len() {
        1 => Ok(vec![values[0]; dim]),
        k if k == dim => Ok(values),
        k => Err(Error::DimensionMismatch(format!("{k} theta entries for {dim} axes"))),
    }
}
