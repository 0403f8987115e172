//! Localised stabilising control.
//!
//! Time is split into unit cycles `[k, k+1]`. On even cycles the free solution
//! `v` started from `u(k)` is glued to the reference `û` through the cutoff
//! `χ(t − k, x)`, so that `u = û + χ (v − û)`; on odd cycles `u = v`. The
//! control `ζ` is whatever forcing makes the glued `u` a solution, and is
//! evaluated in closed form from `v`, `û` and the analytic cutoff derivatives.

mod cutoff;
mod decay;
mod run;

pub use cutoff::{ChiValue, CutoffSystem};
pub use decay::{fit_decay, DecayReport};
pub use run::{
    build_controlled_trajectory, reconstruct_zeta, ControlSetup, ControlledRun, CycleKind, CycleRecord,
};
