//! Hermite functions H_n, Gauss-Hermite quadrature, coefficient fields over
//! boxes of multi-indices (1 ≤ d ≤ 3), analysis/synthesis, ladder algebra.

mod eval;
mod field;
mod ladder;
mod quadrature;
mod transform;

pub use eval::{
    h0_peak, hermite_eval, hermite_eval_all, hermite_eval_capped, hermite_eval_multi,
    hermite_pair_scaled, sup_norm_estimate, sup_norm_table, Scaled, DEFAULT_N_CAP,
};
pub use field::{
    total_order, BoxShape, CoefficientField, FieldKind, MultiIndex, SampledFunction, MAX_DIM,
    MAX_ENTRIES,
};
pub use ladder::{ladder_apply, number_power, LadderOp};
pub use quadrature::{
    gauss_hermite_rule, gauss_hermite_rule_with, GaussHermiteRule, DEFAULT_EIGEN_ITERATIONS,
};
pub use transform::{
    analyze, analyze_samples, clenshaw, default_quad_order, linspace, samples_on_rule,
    synthesize_grid, synthesize_point, QUAD_GUARD,
};
