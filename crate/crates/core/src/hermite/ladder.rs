use super::field::{total_order, CoefficientField};
use crate::error::{Error, Result};

/// Coefficient-space operators built from the ladder relations
/// x H_n = √(n/2) H_{n−1} + √((n+1)/2) H_{n+1} and
/// H_n' = √(n/2) H_{n−1} − √((n+1)/2) H_{n+1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderOp {
    Position(usize),
    Derivative(usize),
    /// N = ½(−∂² + x² − 1) on one axis; N H_n = n H_n.
    Number(usize),
}

/// Apply a ladder operator. Position and derivative grow the box by one on
/// their axis so no coefficient is lost.
pub fn ladder_apply(a: &CoefficientField, op: LadderOp) -> Result<CoefficientField> {
    let (LadderOp::Position(axis) | LadderOp::Derivative(axis) | LadderOp::Number(axis)) = op;
    if axis >= a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "axis {axis} out of range for a {}-d field",
            a.dim()
        )));
    }
    match op {
        LadderOp::Number(_) => CoefficientField::from_fn(a.shape().clone(), a.kind(), |n| {
            a.get(n) * n[axis] as f64
        }),
        LadderOp::Position(_) | LadderOp::Derivative(_) => {
            let sign = if matches!(op, LadderOp::Position(_)) {
                1.0
            } else {
                -1.0
            };
            let grown = a
                .shape()
                .with_order(axis, a.shape().orders()[axis] + 1)
                .map_err(|e| Error::BoxExhausted(e.to_string()))?;
            CoefficientField::from_fn(grown, a.kind(), |n| {
                let k = n[axis];
                let mut up = n.to_vec();
                up[axis] = k + 1;
                let mut acc = a.get(&up) * ((k as f64 + 1.0) / 2.0).sqrt();
                if k > 0 {
                    let mut down = n.to_vec();
                    down[axis] = k - 1;
                    acc += a.get(&down) * (sign * (k as f64 / 2.0).sqrt());
                }
                acc
            })
        }
    }
}

/// a_n ↦ ν^β a_n with ν = Σ_k n_k, the total number operator (0⁰ = 1).
pub fn number_power(a: &CoefficientField, beta: u32) -> Result<CoefficientField> {
    CoefficientField::from_fn(a.shape().clone(), a.kind(), |n| {
        let nu = total_order(n) as f64;
        a.get(n) * nu.powi(beta as i32)
    })
}
