use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub const MAX_DIM: usize = 3;
/// Upper bound on stored entries; keeps untrusted files from requesting
/// absurd allocations.
pub const MAX_ENTRIES: usize = 1 << 24;

pub type MultiIndex = Vec<usize>;

/// Σ_k n_k, the eigenvalue of the total number operator.
pub fn total_order(n: &[usize]) -> usize {
    n.iter().sum()
}

/// Per-axis truncation orders; axis k holds indices 0..N_k.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxShape {
    orders: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl BoxShape {
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() || orders.len() > MAX_DIM {
            return Err(Error::DimensionMismatch(format!(
                "dimension must be 1..={MAX_DIM}, got {}",
                orders.len()
            )));
        }
        if orders.contains(&0) {
            return Err(Error::ParameterOutOfRange("box orders must be >= 1".into()));
        }
        let mut len = 1usize;
        for &o in &orders {
            len = len
                .checked_mul(o)
                .filter(|&l| l <= MAX_ENTRIES)
                .ok_or_else(|| {
                    Error::ParameterOutOfRange(format!("box {orders:?} exceeds {MAX_ENTRIES} entries"))
                })?;
        }
        let mut strides = vec![1usize; orders.len()];
        for k in (0..orders.len() - 1).rev() {
            strides[k] = strides[k + 1] * orders[k + 1];
        }
        Ok(BoxShape {
            orders,
            strides,
            len,
        })
    }

    pub fn cube(dim: usize, order: usize) -> Result<Self> {
        Self::new(vec![order; dim])
    }

    pub fn dim(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn max_order(&self) -> usize {
        self.orders.iter().copied().max().unwrap_or(0)
    }

    pub fn contains(&self, n: &[usize]) -> bool {
        n.len() == self.dim() && n.iter().zip(&self.orders).all(|(a, b)| a < b)
    }

    /// Row-major (lexicographic) position of n.
    pub fn flat_index(&self, n: &[usize]) -> Option<usize> {
        if !self.contains(n) {
            return None;
        }
        Some(n.iter().zip(&self.strides).map(|(a, s)| a * s).sum())
    }

    pub fn multi_index(&self, mut flat: usize) -> MultiIndex {
        let mut out = vec![0; self.dim()];
        for (k, s) in self.strides.iter().enumerate() {
            out[k] = flat / s;
            flat %= s;
        }
        out
    }

    /// Lexicographic enumeration of every index in the box.
    pub fn indices(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.len).map(move |i| self.multi_index(i))
    }

    /// Per-axis minimum of two boxes of the same dimension.
    pub fn intersect(&self, other: &BoxShape) -> Result<BoxShape> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "boxes of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        BoxShape::new(
            self.orders
                .iter()
                .zip(&other.orders)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }

    pub fn fits_within(&self, other: &BoxShape) -> bool {
        self.dim() == other.dim() && self.orders.iter().zip(&other.orders).all(|(a, b)| a <= b)
    }

    pub fn concat(&self, other: &BoxShape) -> Result<BoxShape> {
        let mut o = self.orders.clone();
        o.extend_from_slice(&other.orders);
        BoxShape::new(o)
    }

    pub fn with_order(&self, axis: usize, order: usize) -> Result<BoxShape> {
        let mut o = self.orders.clone();
        o[axis] = order;
        BoxShape::new(o)
    }

    pub fn halved(&self) -> Result<BoxShape> {
        if self.orders.iter().any(|&o| o < 2) {
            return Err(Error::BoxExhausted(format!(
                "box {:?} is too small to halve",
                self.orders
            )));
        }
        BoxShape::new(self.orders.iter().map(|o| o / 2).collect())
    }
}

/// Which side of the duality a coefficient field lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// Test-function coefficients (expected to fall off).
    Test,
    /// Dual-element coefficients (may grow).
    Dual,
}

/// Dense Hermite coefficients over a box of multi-indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField {
    shape: BoxShape,
    kind: FieldKind,
    data: Vec<C64>,
}

impl CoefficientField {
    pub fn new(shape: BoxShape, kind: FieldKind, data: Vec<C64>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::BoxMismatch(format!(
                "box {:?} has {} entries, data has {}",
                shape.orders(),
                shape.len(),
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(format!(
                "coefficient at {:?}",
                shape.multi_index(i)
            )));
        }
        Ok(CoefficientField { shape, kind, data })
    }

    pub fn zeros(shape: BoxShape, kind: FieldKind) -> Self {
        let data = vec![C64::new(0.0, 0.0); shape.len()];
        CoefficientField { shape, kind, data }
    }

    /// The unit field e_n.
    pub fn unit(shape: BoxShape, n: &[usize], kind: FieldKind) -> Result<Self> {
        let i = shape.flat_index(n).ok_or_else(|| {
            Error::BoxMismatch(format!("index {n:?} outside box {:?}", shape.orders()))
        })?;
        let mut f = Self::zeros(shape, kind);
        f.data[i] = C64::new(1.0, 0.0);
        Ok(f)
    }

    pub fn from_fn(shape: BoxShape, kind: FieldKind, mut f: impl FnMut(&[usize]) -> C64) -> Result<Self> {
        let data: Vec<C64> = shape.indices().map(|n| f(&n)).collect();
        Self::new(shape, kind, data)
    }

    pub fn shape(&self) -> &BoxShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: FieldKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    /// Coefficient at n; zero outside the box.
    pub fn get(&self, n: &[usize]) -> C64 {
        self.shape
            .flat_index(n)
            .map(|i| self.data[i])
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, C64)> + '_ {
        self.shape.indices().zip(self.data.iter().copied())
    }

    pub fn scale(&self, s: C64) -> Self {
        CoefficientField {
            shape: self.shape.clone(),
            kind: self.kind,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Entrywise sum; both fields must share a box.
    pub fn add(&self, other: &CoefficientField) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::BoxMismatch(format!(
                "cannot add boxes {:?} and {:?}",
                self.shape.orders(),
                other.shape.orders()
            )));
        }
        Ok(CoefficientField {
            shape: self.shape.clone(),
            kind: self.kind,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Copy into another box of the same dimension, truncating or zero-padding.
    pub fn resized(&self, shape: BoxShape) -> Result<Self> {
        if shape.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot resize a {}-d field into a {}-d box",
                self.dim(),
                shape.dim()
            )));
        }
        let data = shape.indices().map(|n| self.get(&n)).collect();
        Ok(CoefficientField {
            shape,
            kind: self.kind,
            data,
        })
    }

    /// max |a_n|
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&CoefficientFile::from(self)).expect("field serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: CoefficientFile = serde_json::from_str(s)?;
        raw.try_into()
    }
}

/// On-disk form of a coefficient field.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientFile {
    dim: usize,
    #[serde(rename = "box")]
    orders: Vec<usize>,
    kind: FieldKind,
    data: Vec<[f64; 2]>,
}

impl From<&CoefficientField> for CoefficientFile {
    fn from(f: &CoefficientField) -> Self {
        CoefficientFile {
            dim: f.dim(),
            orders: f.shape.orders().to_vec(),
            kind: f.kind,
            data: f.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<CoefficientFile> for CoefficientField {
    type Error = Error;

    fn try_from(raw: CoefficientFile) -> Result<Self> {
        if raw.dim != raw.orders.len() {
            return Err(Error::Malformed(format!(
                "dim {} does not match box {:?}",
                raw.dim, raw.orders
            )));
        }
        let shape = BoxShape::new(raw.orders)?;
        let data = raw.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        CoefficientField::new(shape, raw.kind, data)
    }
}

/// Values of a function on a tensor grid, last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grids: Vec<Vec<f64>>,
    values: Vec<C64>,
}

impl SampledFunction {
    pub fn new(grids: Vec<Vec<f64>>, values: Vec<C64>) -> Result<Self> {
        if grids.is_empty() || grids.len() > MAX_DIM {
            return Err(Error::DimensionMismatch(format!(
                "sampled function dimension must be 1..={MAX_DIM}, got {}",
                grids.len()
            )));
        }
        let mut count = 1usize;
        for (k, g) in grids.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::Malformed(format!("grid on axis {k} is empty")));
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("grid point on axis {k}")));
            }
            if g.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Malformed(format!(
                    "grid on axis {k} is not strictly increasing"
                )));
            }
            count = count
                .checked_mul(g.len())
                .filter(|&c| c <= MAX_ENTRIES)
                .ok_or_else(|| Error::ParameterOutOfRange("sample grid too large".into()))?;
        }
        if values.len() != count {
            return Err(Error::BoxMismatch(format!(
                "grid has {count} points, values has {}",
                values.len()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("sample value".into()));
        }
        Ok(SampledFunction { grids, values })
    }

    pub fn dim(&self) -> usize {
        self.grids.len()
    }

    pub fn grids(&self) -> &[Vec<f64>] {
        &self.grids
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Grid shape, one length per axis.
    pub fn shape(&self) -> Vec<usize> {
        self.grids.iter().map(Vec::len).collect()
    }

    /// Multilinear interpolation; zero outside the sampled hull.
    pub fn interpolate(&self, x: &[f64]) -> C64 {
        let d = self.dim();
        let mut lo = vec![0usize; d];
        let mut frac = vec![0.0f64; d];
        for k in 0..d {
            let g = &self.grids[k];
            if x[k] < g[0] || x[k] > g[g.len() - 1] {
                return C64::new(0.0, 0.0);
            }
            if g.len() == 1 {
                lo[k] = 0;
                frac[k] = 0.0;
                continue;
            }
            let j = g.partition_point(|&v| v <= x[k]).clamp(1, g.len() - 1);
            lo[k] = j - 1;
            frac[k] = (x[k] - g[j - 1]) / (g[j] - g[j - 1]);
        }
        let shape = self.shape();
        let mut acc = C64::new(0.0, 0.0);
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut flat = 0usize;
            let mut skip = false;
            for k in 0..d {
                let up = (corner >> k) & 1 == 1;
                let idx = lo[k] + usize::from(up);
                // only reachable on single-point axes, where the weight is zero
                if idx >= shape[k] {
                    skip = true;
                    break;
                }
                w *= if up { frac[k] } else { 1.0 - frac[k] };
                flat = flat * shape[k] + idx;
            }
            if skip || w == 0.0 {
                continue;
            }
            acc += self.values[flat] * w;
        }
        acc
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&SampledFile {
            dim: self.dim(),
            grids: self.grids.clone(),
            values: self.values.iter().map(|z| [z.re, z.im]).collect(),
        })
        .expect("samples serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: SampledFile = serde_json::from_str(s)?;
        if raw.dim != raw.grids.len() {
            return Err(Error::Malformed(format!(
                "dim {} does not match {} grids",
                raw.dim,
                raw.grids.len()
            )));
        }
        SampledFunction::new(
            raw.grids,
            raw.values.iter().map(|&[re, im]| C64::new(re, im)).collect(),
        )
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampledFile {
    dim: usize,
    grids: Vec<Vec<f64>>,
    values: Vec<[f64; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_enumeration() {
        let b = BoxShape::new(vec![2, 3]).unwrap();
        let all: Vec<_> = b.indices().collect();
        assert_eq!(
            all,
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![1, 2]]
        );
        for (i, n) in all.iter().enumerate() {
            assert_eq!(b.flat_index(n), Some(i));
        }
        assert_eq!(b.flat_index(&[2, 0]), None);
    }

    #[test]
    fn box_validation() {
        assert!(BoxShape::new(vec![]).is_err());
        assert!(BoxShape::new(vec![1, 1, 1, 1]).is_err());
        assert!(BoxShape::new(vec![0]).is_err());
        assert!(BoxShape::new(vec![usize::MAX, 2]).is_err());
        assert!(BoxShape::new(vec![1]).unwrap().halved().is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let b = BoxShape::new(vec![3, 2]).unwrap();
        let f = CoefficientField::from_fn(b, FieldKind::Dual, |n| {
            C64::new(0.1 * n[0] as f64 + 1e-300, -1.0 / 3.0 * n[1] as f64)
        })
        .unwrap();
        let s = f.to_json_string();
        let g = CoefficientField::from_json_str(&s).unwrap();
        assert_eq!(f, g);
        for (a, b) in f.data().iter().zip(g.data()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(g.to_json_string(), s);
    }

    #[test]
    fn json_rejects_inconsistent_files() {
        assert!(CoefficientField::from_json_str(
            r#"{"dim":2,"box":[2],"kind":"test","data":[[0,0],[0,0]]}"#
        )
        .is_err());
        assert!(CoefficientField::from_json_str(
            r#"{"dim":1,"box":[3],"kind":"test","data":[[0,0],[0,0]]}"#
        )
        .is_err());
        assert!(CoefficientField::from_json_str(
            r#"{"dim":1,"box":[1],"kind":"weird","data":[[0,0]]}"#
        )
        .is_err());
    }

    #[test]
    fn interpolation() {
        let s = SampledFunction::new(
            vec![vec![0.0, 1.0, 2.0]],
            vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 4.0)],
        )
        .unwrap();
        assert_eq!(s.interpolate(&[0.5]), C64::new(1.0, 0.0));
        assert_eq!(s.interpolate(&[1.5]), C64::new(1.0, 2.0));
        assert_eq!(s.interpolate(&[2.0]), C64::new(0.0, 4.0));
        assert_eq!(s.interpolate(&[3.0]), C64::new(0.0, 0.0));
        let back = SampledFunction::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn interpolation_2d_bilinear() {
        let s = SampledFunction::new(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(2.0, 0.0),
                C64::new(3.0, 0.0),
            ],
        )
        .unwrap();
        // f(x, y) = 2x + y
        assert!((s.interpolate(&[0.25, 0.5]) - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((s.interpolate(&[1.0, 1.0]) - C64::new(3.0, 0.0)).norm() < 1e-15);
    }
}
