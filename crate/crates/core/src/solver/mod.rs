//! Time integration of the controlled Burgers problem, of the linear
//! conservative advection–diffusion equation satisfied by differences of
//! Burgers solutions, and of its backward dual.
//!
//! All schemes are Crank–Nicolson in time on the uniform node grid. With
//! [`Stepping::Monotone`] (the default) each output frame is split into
//! substeps with diffusion number `ν δt / dx² ≤ 1`; under the cell-Péclet
//! condition `|a| dx ≤ 2ν` both halves of every substep are then M-matrix /
//! non-negative operators, so the discrete solutions keep the maximum
//! principle, positivity and L¹ contraction exactly.

mod burgers;
mod invariants;
mod linear;

pub use burgers::{solve_burgers, BurgersProblem};
pub use invariants::{l1_difference_increase, l1_increase, max_principle_excess};
pub use linear::{cell_peclet, duality_pairing_drift, solve_dual, solve_linear, Direction, LinearProblem};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::Real;
use std::fmt;
use std::sync::Arc;

/// How output frames are subdivided into Crank–Nicolson steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stepping {
    /// Substeps with diffusion number at most one (monotone scheme).
    #[default]
    Monotone,
    /// One Crank–Nicolson step per output frame.
    Fixed,
}

/// A function of `(t, x)`, used for forcing terms, controls and barriers.
#[derive(Clone)]
pub struct SpaceTimeFn<T> {
    f: Option<Arc<dyn Fn(T, T) -> T + Send + Sync>>,
}

impl<T: Real> SpaceTimeFn<T> {
    pub fn new(f: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        Self { f: Some(Arc::new(f)) }
    }

    /// The identically zero function; evaluation is skipped by the solvers.
    pub fn zero() -> Self {
        Self { f: None }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.f.is_none()
    }

    #[inline]
    pub fn eval(&self, t: T, x: T) -> T {
        match &self.f {
            Some(f) => f(t, x),
            None => T::zero(),
        }
    }

    /// Sup of `|f|` over a `(n_t + 1) × (nodes)` lattice covering `[t0, t1] × [0, 1]`.
    pub fn sup_on(&self, grid: &Grid<T>, t0: T, t1: T, n_t: usize) -> T {
        if self.is_zero() {
            return T::zero();
        }
        let n_t = n_t.max(1);
        let mut sup = T::zero();
        for k in 0..=n_t {
            let t = t0 + (t1 - t0) * T::from_usize_lossy(k) / T::from_usize_lossy(n_t);
            for x in grid.nodes() {
                sup = sup.max(self.eval(t, x).abs());
            }
        }
        sup
    }

    fn sample_into(&self, t: T, grid: &Grid<T>, out: &mut [T]) {
        match &self.f {
            Some(f) => {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = f(t, grid.x(i));
                }
            }
            None => out.iter_mut().for_each(|o| *o = T::zero()),
        }
    }
}

impl<T> fmt::Debug for SpaceTimeFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.f {
            Some(_) => f.write_str("SpaceTimeFn(..)"),
            None => f.write_str("SpaceTimeFn(0)"),
        }
    }
}

impl<T: Real> Default for SpaceTimeFn<T> {
    fn default() -> Self {
        Self::zero()
    }
}

/// Splits `[t_start, t_end]` into whole frames of length at most `dt`.
pub(crate) fn frame_count<T: Real>(t_start: T, t_end: T, dt: T) -> Result<(usize, T)> {
    let span = t_end - t_start;
    if !(span > T::zero()) {
        return Err(Error::precondition(format!(
            "time span [{t_start}, {t_end}] is empty"
        )));
    }
    if !(dt > T::zero()) || dt > span * (T::one() + T::lit(1e-12)) {
        return Err(Error::precondition(format!(
            "dt = {dt} must be positive and not exceed the span {span}"
        )));
    }
    let n = (span / dt - T::lit(1e-9)).ceil().max(T::one());
    let n = n.to_usize().ok_or_else(|| Error::precondition("too many frames"))?;
    Ok((n, span / T::from_usize_lossy(n)))
}
