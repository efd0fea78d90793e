//! Weight sequences {M_p}, their standard conditions, and the associated
//! function M(ρ) = sup_p log(ρ^p / M_p).

mod assoc;
mod conditions;
mod sequence;

pub use assoc::{
    associated_fn, brute_force, log_weight, AssocOptions, AssocValue, AssociatedFunctionTable,
    DEFAULT_P_CAP,
};
pub use conditions::{
    check_m1, check_m2, check_m3_nontrivial, check_m3_quasi, Condition, ConditionReport,
    NontrivialMode, Verdict, M1_TOL, TREND_BAND,
};
pub use sequence::{
    ln_factorial, make_sequence, Family, FamilySpec, SequenceSpec, WeightFn, WeightSequence,
    DEFAULT_P_MAX,
};
