//! Criterion constants, the sup-over-T criterion functional and the
//! global/blowup classifier.

mod classify;
mod constants;
mod curve;

pub use classify::{classify, classify_with, CriterionReport, DatumSummary, Verdict, CRITICAL_MASS_2D};
pub use constants::{
    blowup_rate_bound, constant_c, constant_c_alpha, constant_k, constant_k_closed, constant_l, constant_l2,
    constants_from_table, criterion_constants, threshold_n, CriterionConstants,
};
pub use curve::{criterion_curve, default_range, CriterionCurve, PER_DECADE, SPAN};
