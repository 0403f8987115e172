//! Measurements of the solver-level invariants on computed trajectories.

use crate::error::{Error, Result};
use crate::grid::{norm_l1, norm_linf, Trajectory};
use crate::scalar::Real;

/// `max_k ‖u(t_k)‖_∞ − (‖u(t_0)‖_∞ + (t_k − t_0) h_sup)`. Non-positive when the
/// classical maximum principle bound holds on every frame.
pub fn max_principle_excess<T: Real>(u: &Trajectory<T>, h_sup: T) -> T {
    let u0 = norm_linf(u.first());
    u.frames()
        .iter()
        .enumerate()
        .map(|(k, f)| norm_linf(f) - (u0 + (u.time(k) - u.t0()) * h_sup))
        .fold(T::neg_infinity(), T::max)
}

/// Largest one-step increase of `‖w(t_k)‖_{L¹}`; zero or negative for an L¹ contraction.
pub fn l1_increase<T: Real>(w: &Trajectory<T>) -> T {
    let norms: Vec<T> = w.frames().iter().map(norm_l1).collect();
    norms
        .windows(2)
        .map(|p| p[1] - p[0])
        .fold(T::neg_infinity(), T::max)
}

/// Largest one-step increase of `‖u(t_k) − v(t_k)‖_{L¹}` for two trajectories on the same frames.
pub fn l1_difference_increase<T: Real>(u: &Trajectory<T>, v: &Trajectory<T>) -> Result<T> {
    if u.grid() != v.grid() || u.len() != v.len() {
        return Err(Error::precondition("trajectories do not share frames"));
    }
    let norms: Vec<T> = u
        .frames()
        .iter()
        .zip(v.frames())
        .map(|(a, b)| norm_l1(&a.sub(b)))
        .collect();
    Ok(norms
        .windows(2)
        .map(|p| p[1] - p[0])
        .fold(T::neg_infinity(), T::max))
}
