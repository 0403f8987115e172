use crate::error::{Error, Result};
use crate::grid::{Interval, Trajectory};
use crate::scalar::Real;
use serde::Serialize;

/// Result of comparing an upper and a lower function on `[t0, T] × I″`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `max (lower − upper)₊` over all frames and nodes of `I″`.
    pub max_violation: f64,
    /// Same maximum restricted to the last frame.
    pub final_violation: f64,
    pub initial_ok: bool,
    pub boundary_ok: bool,
}

/// Checks `upper ≥ lower` on the nodes of `sub` (rounded inward).
///
/// The ordering is first verified, up to `tol`, on the first frame and at the
/// two end nodes of `sub` on every frame; a violation there is reported as a
/// precondition error naming its location. The interior comparison is then
/// measured, not enforced.
pub fn comparison_check<T: Real>(
    upper: &Trajectory<T>,
    lower: &Trajectory<T>,
    sub: Interval<T>,
    tol: T,
) -> Result<ComparisonReport> {
    if upper.grid() != lower.grid() || upper.len() != lower.len() || upper.is_empty() {
        return Err(Error::precondition("comparison needs trajectories on the same frames"));
    }
    let slack = upper.dt() * T::lit(1e-9);
    if (upper.t0() - lower.t0()).abs() > slack || (upper.dt() - lower.dt()).abs() > slack {
        return Err(Error::precondition("comparison needs trajectories on the same frames"));
    }
    let grid = upper.grid();
    let nodes = grid.inner_node_range(sub);
    if nodes.is_empty() {
        return Err(Error::precondition("sub-interval contains no grid node"));
    }
    let (first, last) = (*nodes.start(), *nodes.end());

    let (u0, l0) = (upper.first().values(), lower.first().values());
    for i in nodes.clone() {
        if l0[i] - u0[i] > tol {
            return Err(Error::precondition(format!(
                "initial ordering violated at x = {}: lower {} > upper {}",
                grid.x(i),
                l0[i],
                u0[i]
            )));
        }
    }
    for k in 0..upper.len() {
        let (u, l) = (upper.frame(k).values(), lower.frame(k).values());
        for i in [first, last] {
            if l[i] - u[i] > tol {
                return Err(Error::precondition(format!(
                    "boundary ordering violated at t = {}, x = {}: lower {} > upper {}",
                    upper.time(k),
                    grid.x(i),
                    l[i],
                    u[i]
                )));
            }
        }
    }

    let frame_violation = |k: usize| {
        let (u, l) = (upper.frame(k).values(), lower.frame(k).values());
        nodes
            .clone()
            .map(|i| (l[i] - u[i]).max(T::zero()))
            .fold(T::zero(), T::max)
    };
    let max_violation = (0..upper.len()).map(frame_violation).fold(T::zero(), T::max);
    Ok(ComparisonReport {
        max_violation: max_violation.as_f64(),
        final_violation: frame_violation(upper.len() - 1).as_f64(),
        initial_ok: true,
        boundary_ok: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn traj(f: impl Fn(f64, f64) -> f64) -> Trajectory<f64> {
        Trajectory::from_fn(Grid::new(16).unwrap(), 0.0, 0.25, 4, f).unwrap()
    }

    #[test]
    fn identical_trajectories() {
        let u = traj(|t, x| (t + 1.0) * x);
        let r = comparison_check(&u, &u, Interval::unit(), 0.0).unwrap();
        assert_eq!(r.max_violation, 0.0);
        assert!(r.initial_ok && r.boundary_ok);
    }

    #[test]
    fn interior_violation_is_measured() {
        let up = traj(|_, _| 1.0);
        let lo = traj(|t, x| 1.0 + t * (std::f64::consts::PI * x).sin());
        let r = comparison_check(&up, &lo, Interval::unit(), 1e-12).unwrap();
        assert!((r.max_violation - 1.0).abs() < 1e-12);
        assert!((r.final_violation - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hypothesis_violations_are_errors() {
        let up = traj(|_, _| 0.0);
        let lo_init = traj(|t, _| if t == 0.0 { 1.0 } else { -1.0 });
        let e = comparison_check(&up, &lo_init, Interval::unit(), 1e-9).unwrap_err();
        assert!(e.to_string().contains("initial ordering"));
        let lo_bdry = traj(|t, x| if t > 0.0 && x == 0.5 { 1.0 } else { -1.0 });
        let e = comparison_check(&up, &lo_bdry, Interval::new(0.0, 0.5).unwrap(), 1e-9).unwrap_err();
        assert!(e.to_string().contains("boundary ordering"));
    }
}
