//! Empirical probes of the linear equation `∂ₜw − ν∂ₓ²w + ∂ₓ(a w) = 0`
//! satisfied by differences of Burgers solutions: the L¹ contraction or
//! inner-mass dichotomy, the Harnack quotient and the sup bound in terms of
//! the initial L¹ norm.

mod coefficient;
mod ensemble;
mod probes;

pub use coefficient::{BoundedCoefficient, CoefficientBound, DatumKind, RandomCoefficient, RandomDatum};
pub use ensemble::{
    dichotomy_frontier, ensemble_dichotomy, representative_point, run_ensemble, EnsembleReport, EnsembleSpec,
    FrontierPoint, ScenarioDraw, ScenarioOutcome,
};
pub use probes::{
    decomposition_defect, dichotomy_probe, harnack_probe, solve_forward, sup_bound_probe, DichotomyVerdict,
    HarnackEstimate,
};
