//! Simulation and verification toolkit for exponential stabilisation of the
//! one-dimensional viscous Burgers equation by a control supported in a
//! sub-interval.
//!
//! All numerics are generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod barriers;
pub mod control;
pub mod error;
pub mod grid;
pub mod presets;
pub mod scalar;
pub mod solver;
pub mod tridiag;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` instances of the generic types.
pub type Grid64 = grid::Grid<f64>;
pub type Interval64 = grid::Interval<f64>;
pub type Field64 = grid::Field<f64>;
pub type Trajectory64 = grid::Trajectory<f64>;
pub type BurgersProblem64 = solver::BurgersProblem<f64>;
pub type LinearProblem64 = solver::LinearProblem<f64>;
pub type SpaceTimeFn64 = solver::SpaceTimeFn<f64>;
pub type CutoffSystem64 = control::CutoffSystem<f64>;
pub type ControlSetup64 = control::ControlSetup<f64>;
pub type ControlledRun64 = control::ControlledRun<f64>;
pub type BoundedCoefficient64 = analysis::BoundedCoefficient<f64>;
pub type Barrier64 = barriers::Barrier<f64>;
