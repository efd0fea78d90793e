//! Kernel coefficients t_{(n,k)} = B(H_n, H_k) of a bilinear form and the
//! operator they induce, (Kφ)_n = Σ_k t_{(n,k)} φ_k.
//!
//! Rows run over the output box (l axes), columns over the input box (s
//! axes), both lexicographic. Operations that form ψ ⊗ φ need l + s ≤ 3. The identity ⟨Kφ, ψ⟩ = K(ψ ⊗ φ) puts ψ in the
//! first tensor slot.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{total_order, BoxShape, CoefficientField, FieldKind, MultiIndex, MAX_ENTRIES};
use crate::spaces::{compensated_sum, parseval_pair, tail_non_increasing, GrowthCheck};
use crate::weights::AssociatedFunctionTable;
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct KernelCoefficients {
    out_shape: BoxShape,
    in_shape: BoxShape,
    data: Vec<C64>,
}

impl KernelCoefficients {
    pub fn new(out_shape: BoxShape, in_shape: BoxShape, data: Vec<C64>) -> Result<Self> {
        let len = out_shape.len() * in_shape.len();
        if len > MAX_ENTRIES {
            return Err(Error::BoxMismatch(format!("kernel needs {len} entries, limit is {MAX_ENTRIES}")));
        }
        if data.len() != len {
            return Err(Error::BoxMismatch(format!(
                "kernel data has {} entries, boxes need {len}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(format!("kernel entry {i}")));
        }
        Ok(KernelCoefficients { out_shape, in_shape, data })
    }

    pub fn from_fn(
        out_shape: BoxShape,
        in_shape: BoxShape,
        mut f: impl FnMut(&[usize], &[usize]) -> C64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(out_shape.len() * in_shape.len());
        for n in out_shape.indices() {
            for k in in_shape.indices() {
                data.push(f(&n, &k));
            }
        }
        Self::new(out_shape, in_shape, data)
    }

    pub fn l(&self) -> usize {
        self.out_shape.dim()
    }

    pub fn s(&self) -> usize {
        self.in_shape.dim()
    }

    pub fn out_shape(&self) -> &BoxShape {
        &self.out_shape
    }

    pub fn in_shape(&self) -> &BoxShape {
        &self.in_shape
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    fn cols(&self) -> usize {
        self.in_shape.len()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols()..(i + 1) * self.cols()]
    }

    /// t_{(n,k)}, zero outside the boxes.
    pub fn get(&self, n: &[usize], k: &[usize]) -> C64 {
        match (self.out_shape.flat_index(n), self.in_shape.flat_index(k)) {
            (Some(i), Some(j)) => self.data[i * self.cols() + j],
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&KernelFile {
            l: self.l(),
            s: self.s(),
            out_box: self.out_shape.orders().to_vec(),
            in_box: self.in_shape.orders().to_vec(),
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        })
        .expect("kernel serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: KernelFile = serde_json::from_str(s)?;
        if raw.l != raw.out_box.len() || raw.s != raw.in_box.len() {
            return Err(Error::Malformed(format!(
                "l = {}, s = {} do not match boxes {:?}, {:?}",
                raw.l, raw.s, raw.out_box, raw.in_box
            )));
        }
        let data = raw.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Self::new(BoxShape::new(raw.out_box)?, BoxShape::new(raw.in_box)?, data)
    }

    pub fn identity(shape: BoxShape) -> Result<Self> {
        Self::diagonal(shape, |_| C64::new(1.0, 0.0))
    }

    /// diag((−i)^ν), the Fourier transform in Hermite coordinates.
    pub fn fourier(shape: BoxShape) -> Result<Self> {
        Self::diagonal(shape, |n| match total_order(n) % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        })
    }

    /// diag(e^{−τν}), the semigroup generated by the number operator.
    pub fn heat(shape: BoxShape, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::ParameterOutOfRange(format!("tau must be nonnegative, got {tau}")));
        }
        Self::diagonal(shape, |n| C64::new((-tau * total_order(n) as f64).exp(), 0.0))
    }

    /// t_{(n,k)} = a_n b_k.
    pub fn rank_one(a: &CoefficientField, b: &CoefficientField) -> Result<Self> {
        let data = a
            .data()
            .iter()
            .flat_map(|&x| b.data().iter().map(move |&y| x * y))
            .collect();
        Self::new(a.shape().clone(), b.shape().clone(), data)
    }

    fn diagonal(shape: BoxShape, f: impl Fn(&[usize]) -> C64) -> Result<Self> {
        Self::from_fn(shape.clone(), shape, |n, k| if n == k { f(n) } else { C64::new(0.0, 0.0) })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelFile {
    l: usize,
    s: usize,
    out_box: Vec<usize>,
    in_box: Vec<usize>,
    data: Vec<[f64; 2]>,
}

/// A bilinear form B(ψ, φ) with ψ on the output side and φ on the input side.
pub trait Bilinear: Sync {
    fn eval(&self, psi: &CoefficientField, phi: &CoefficientField) -> Result<C64>;

    /// Evaluations must run one at a time.
    fn serial(&self) -> bool {
        false
    }
}

impl<F> Bilinear for F
where
    F: Fn(&CoefficientField, &CoefficientField) -> Result<C64> + Sync,
{
    fn eval(&self, psi: &CoefficientField, phi: &CoefficientField) -> Result<C64> {
        self(psi, phi)
    }
}

/// Runs the wrapped form without parallel evaluation.
pub struct Serial<B>(pub B);

impl<B: Bilinear> Bilinear for Serial<B> {
    fn eval(&self, psi: &CoefficientField, phi: &CoefficientField) -> Result<C64> {
        self.0.eval(psi, phi)
    }

    fn serial(&self) -> bool {
        true
    }
}

/// Σ_n ψ_n φ_n over the common box.
pub struct DotForm;

impl Bilinear for DotForm {
    fn eval(&self, psi: &CoefficientField, phi: &CoefficientField) -> Result<C64> {
        parseval_pair(psi, phi)
    }
}

/// ψ_0 φ_0.
pub struct OriginForm;

impl Bilinear for OriginForm {
    fn eval(&self, psi: &CoefficientField, phi: &CoefficientField) -> Result<C64> {
        Ok(psi.get(&vec![0; psi.dim()]) * phi.get(&vec![0; phi.dim()]))
    }
}

/// The unit vector e_n on the smallest box holding n.
fn basis(n: &[usize], kind: FieldKind) -> CoefficientField {
    let shape = BoxShape::new(n.iter().map(|k| k + 1).collect()).expect("index box is valid");
    CoefficientField::unit(shape, n, kind).expect("index lies in its own box")
}

/// t_{(n,k)} = B(e_n, e_k) over the two boxes. Unit vectors are passed on the
/// smallest box containing their index.
pub fn kernel_from_bilinear(b: &dyn Bilinear, out_shape: &BoxShape, in_shape: &BoxShape) -> Result<KernelCoefficients> {
    let cols: Vec<(MultiIndex, CoefficientField)> =
        in_shape.indices().map(|k| { let e = basis(&k, FieldKind::Test); (k, e) }).collect();
    let row = |i: usize| -> Result<Vec<C64>> {
        let n = out_shape.multi_index(i);
        let e_n = basis(&n, FieldKind::Test);
        cols.iter()
            .map(|(k, e_k)| {
                b.eval(&e_n, e_k).map_err(|e| Error::Evaluator {
                    index: format!("({n:?}, {k:?})"),
                    message: e.to_string(),
                })
            })
            .collect()
    };
    let rows: Vec<Vec<C64>> = if b.serial() {
        (0..out_shape.len()).map(row).collect::<Result<_>>()?
    } else {
        (0..out_shape.len()).into_par_iter().map(row).collect::<Result<_>>()?
    };
    KernelCoefficients::new(out_shape.clone(), in_shape.clone(), rows.concat())
}

/// (Kφ)_n = Σ_k t_{(n,k)} φ_k as a dual field over the output box.
pub fn apply_operator(t: &KernelCoefficients, phi: &CoefficientField) -> Result<CoefficientField> {
    if phi.dim() != t.s() || !phi.shape().fits_within(t.in_shape()) {
        return Err(Error::BoxMismatch(format!(
            "input box {:?} does not fit the kernel input box {:?}",
            phi.shape().orders(),
            t.in_shape().orders()
        )));
    }
    let padded = phi.resized(t.in_shape().clone())?;
    let data: Vec<C64> = (0..t.out_shape().len())
        .into_par_iter()
        .map(|i| compensated_sum(t.row(i).iter().zip(padded.data()).map(|(a, b)| a * b)))
        .collect();
    CoefficientField::new(t.out_shape().clone(), FieldKind::Dual, data)
}

/// c_{(n,k)} = a_n b_k on the product box.
pub fn tensor(a: &CoefficientField, b: &CoefficientField) -> Result<CoefficientField> {
    let shape = a.shape().concat(b.shape())?;
    let data = a
        .data()
        .iter()
        .flat_map(|&x| b.data().iter().map(move |&y| x * y))
        .collect();
    CoefficientField::new(shape, a.kind(), data)
}

/// Σ_{(n,k)} t_{(n,k)} Φ_{(n,k)}.
pub fn pair_kernel(t: &KernelCoefficients, big_phi: &CoefficientField) -> Result<C64> {
    let l = t.l();
    let full = t.out_shape().concat(t.in_shape())?;
    if big_phi.dim() != full.dim() || !big_phi.shape().fits_within(&full) {
        return Err(Error::BoxMismatch(format!(
            "field box {:?} does not fit the kernel boxes {:?}",
            big_phi.shape().orders(),
            full.orders()
        )));
    }
    Ok(compensated_sum(
        big_phi
            .iter()
            .filter(|(_, z)| *z != C64::new(0.0, 0.0))
            .map(|(nk, z)| t.get(&nk[..l], &nk[l..]) * z),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelIdentity {
    /// ⟨Kφ, ψ⟩.
    pub lhs: C64,
    /// K(ψ ⊗ φ).
    pub rhs: C64,
    pub residual: f64,
    /// residual over max(|lhs|, |rhs|).
    pub relative: f64,
}

pub fn verify_kernel_identity(
    t: &KernelCoefficients,
    phi: &CoefficientField,
    psi: &CoefficientField,
) -> Result<KernelIdentity> {
    let lhs = parseval_pair(&apply_operator(t, phi)?, psi)?;
    let rhs = pair_kernel(t, &tensor(psi, phi)?)?;
    let residual = (lhs - rhs).norm();
    let scale = lhs.norm().max(rhs.norm());
    Ok(KernelIdentity {
        lhs,
        rhs,
        residual,
        relative: if scale == 0.0 { 0.0 } else { residual / scale },
    })
}

/// |t_{(n,k)}| ≤ C exp[2Σ_i M(θ_i√n_i) + 2Σ_j M(ν_j√k_j)]: log C over the
/// boxes and the shell-trend verdict of [`crate::spaces::growth_check`],
/// with shells by total order of (n, k).
pub fn kernel_growth_check(
    t: &KernelCoefficients,
    table: &AssociatedFunctionTable,
    theta: &[f64],
    nu: &[f64],
) -> Result<GrowthCheck> {
    if theta.len() != t.l() || nu.len() != t.s() {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} and nu {} components for a ({}, {}) kernel",
            theta.len(),
            nu.len(),
            t.l(),
            t.s()
        )));
    }
    let w_out: Vec<f64> = t.out_shape().indices().map(|n| table.log_weight(theta, &n)).collect::<Result<_>>()?;
    let w_in: Vec<f64> = t.in_shape().indices().map(|k| table.log_weight(nu, &k)).collect::<Result<_>>()?;
    let ord_in: Vec<usize> = t.in_shape().indices().map(|k| total_order(&k)).collect();
    let shells = t.out_shape().orders().iter().chain(t.in_shape().orders()).map(|o| o - 1).sum::<usize>() + 1;
    let mut shell = vec![f64::NEG_INFINITY; shells];
    let mut log_c = f64::NEG_INFINITY;
    for (i, n) in t.out_shape().indices().enumerate() {
        let on = total_order(&n);
        for (j, z) in t.row(i).iter().enumerate() {
            let q = z.norm().ln() - 2.0 * w_out[i] - 2.0 * w_in[j];
            log_c = log_c.max(q);
            let s = &mut shell[on + ord_in[j]];
            *s = s.max(q);
        }
    }
    Ok(GrowthCheck { passes: tail_non_increasing(&shell), log_c })
}

/// max over the boxes of |pair_kernel(t, e_n ⊗ e_k) − t_{(n,k)}|.
pub fn kernel_uniqueness_probe(t: &KernelCoefficients) -> Result<f64> {
    let cols: Vec<MultiIndex> = t.in_shape().indices().collect();
    let worst: Vec<f64> = (0..t.out_shape().len())
        .into_par_iter()
        .map(|i| {
            let n = t.out_shape().multi_index(i);
            let e_n = basis(&n, FieldKind::Test);
            cols.iter().enumerate().try_fold(0.0f64, |acc, (j, k)| {
                let got = pair_kernel(t, &tensor(&e_n, &basis(k, FieldKind::Test))?)?;
                Ok(acc.max((got - t.row(i)[j]).norm()))
            })
        })
        .collect::<Result<_>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}
