//! Explicit super- and sub-solutions, the comparison check between ordered
//! functions, and the experiment showing that a control supported in
//! `[a, b]` cannot push `u(T)` above a fixed level on `[0, δ]`, `δ < a`.

mod comparison;
mod noncontrol;
mod profile;

pub use comparison::{comparison_check, ComparisonReport};
pub use noncontrol::{
    non_controllability_experiment, random_controls, AdversarialControl, ControlShape, NonControlReport,
    NonControlRun, NonControlSpec,
};
pub use profile::{
    check_subsolution, check_supersolution, global_coefficient, global_limit_bound, left_lambda, left_limit_bound,
    residual_range, Barrier, BarrierKind, Jet, Profile, ResidualRange,
};
