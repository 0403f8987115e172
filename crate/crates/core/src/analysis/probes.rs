use super::BoundedCoefficient;
use crate::error::{Error, Result};
use crate::grid::{norm_l1, norm_l1_on, norm_linf, Field, Interval, Trajectory};
use crate::scalar::Real;
use crate::solver::{solve_linear, LinearProblem};
use serde::Serialize;

/// Outcome of one dichotomy probe on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DichotomyVerdict {
    /// `‖w(T)‖_{L¹} / ‖w(0)‖_{L¹}`.
    pub q_side: f64,
    /// `‖w(T)‖_{L¹(I′)} / ‖w(0)‖_{L¹}`.
    pub mass_side: f64,
    pub q: f64,
    pub eps: f64,
    pub contraction_holds: bool,
    pub mass_holds: bool,
}

impl DichotomyVerdict {
    /// At least one of the two inequalities holds.
    pub fn holds(&self) -> bool {
        self.contraction_holds || self.mass_holds
    }

    /// Re-evaluates the verdict for other thresholds.
    pub fn with_thresholds(&self, q: f64, eps: f64) -> Self {
        Self {
            q,
            eps,
            contraction_holds: self.q_side <= q,
            mass_holds: self.mass_side >= eps,
            ..*self
        }
    }
}

/// Harnack quotient `sup_K w(T′) / inf_K w(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarnackEstimate {
    pub k_lo: f64,
    pub k_hi: f64,
    pub t_prime: f64,
    pub t_end: f64,
    pub sup_early: f64,
    pub inf_late: f64,
    pub ratio: f64,
}

/// Solves the forward linear equation over the listed break points, so every
/// break point is a frame. Returns the frames at each break point and the
/// whole trajectory of every segment.
fn solve_segments<T: Real>(
    nu: T,
    coeff: &BoundedCoefficient<T>,
    w0: &Field<T>,
    breaks: &[T],
) -> Result<Vec<Trajectory<T>>> {
    let a = coeff.trajectory();
    let dt = a.dt();
    let mut w = w0.clone();
    let mut t = T::zero();
    let mut segments = Vec::with_capacity(breaks.len());
    for &b in breaks {
        let seg_dt = dt.min(b - t);
        let traj = solve_linear(&LinearProblem::forward(nu, a.clone(), w, t, b, seg_dt))?;
        w = traj.last().clone();
        t = b;
        segments.push(traj);
    }
    Ok(segments)
}

fn nonzero_l1<T: Real>(w0: &Field<T>) -> Result<T> {
    let m = norm_l1(w0);
    if !(m > T::zero()) {
        return Err(Error::precondition("initial datum must be non-zero"));
    }
    Ok(m)
}

/// Solves `∂ₜw − ν∂ₓ²w + ∂ₓ(a w) = 0` on `[0, T]` from `w0`.
pub fn solve_forward<T: Real>(nu: T, coeff: &BoundedCoefficient<T>, w0: &Field<T>, t_end: T) -> Result<Trajectory<T>> {
    let a = coeff.trajectory();
    solve_linear(&LinearProblem::forward(nu, a.clone(), w0.clone(), T::zero(), t_end, a.dt().min(t_end)))
}

/// Measures both sides of the dichotomy for one coefficient and datum.
pub fn dichotomy_probe<T: Real>(
    nu: T,
    coeff: &BoundedCoefficient<T>,
    w0: &Field<T>,
    inner: Interval<T>,
    t_end: T,
    q: f64,
    eps: f64,
) -> Result<DichotomyVerdict> {
    let m0 = nonzero_l1(w0)?;
    let w = solve_forward(nu, coeff, w0, t_end)?;
    let end = w.last();
    let q_side = (norm_l1(end) / m0).as_f64();
    let mass_side = (norm_l1_on(end, inner) / m0).as_f64();
    Ok(DichotomyVerdict {
        q_side,
        mass_side,
        q,
        eps,
        contraction_holds: q_side <= q,
        mass_holds: mass_side >= eps,
    })
}

/// `max_t ‖w(t) − (w⁺(t) − w⁻(t))‖_∞` where `w⁺`, `w⁻` start from the positive
/// and negative parts of `w0`.
pub fn decomposition_defect<T: Real>(nu: T, coeff: &BoundedCoefficient<T>, w0: &Field<T>, t_end: T) -> Result<T> {
    let w = solve_forward(nu, coeff, w0, t_end)?;
    let wp = solve_forward(nu, coeff, &w0.positive_part(), t_end)?;
    let wm = solve_forward(nu, coeff, &w0.negative_part(), t_end)?;
    Ok(w
        .frames()
        .iter()
        .zip(wp.frames().iter().zip(wm.frames()))
        .map(|(f, (p, m))| norm_linf(&f.sub(&p.sub(m))))
        .fold(T::zero(), T::max))
}

/// Harnack quotient for a non-negative datum. `K` is located on the grid by
/// rounding its end points inward to nodes.
pub fn harnack_probe<T: Real>(
    nu: T,
    coeff: &BoundedCoefficient<T>,
    w0: &Field<T>,
    k: Interval<T>,
    t_prime: T,
    t_end: T,
) -> Result<HarnackEstimate> {
    if w0.min_value() < T::zero() {
        return Err(Error::precondition("Harnack probe needs a non-negative datum"));
    }
    nonzero_l1(w0)?;
    if !(k.lo() > T::zero() && k.hi() < T::one()) {
        return Err(Error::precondition("K must lie strictly inside (0, 1)"));
    }
    if !(t_prime > T::zero() && t_prime < t_end) {
        return Err(Error::precondition(format!("need 0 < T' < T, got T' = {t_prime}, T = {t_end}")));
    }
    let segments = solve_segments(nu, coeff, w0, &[t_prime, t_end])?;
    let nodes = w0.grid().inner_node_range(k);
    if nodes.is_empty() {
        return Err(Error::precondition("K contains no grid node"));
    }
    let early = segments[0].last().values();
    let late = segments[1].last().values();
    let sup_early = nodes.clone().map(|i| early[i]).fold(T::neg_infinity(), T::max);
    let inf_late = nodes.map(|i| late[i]).fold(T::infinity(), T::min);
    if !(inf_late > T::zero()) {
        return Err(Error::PositivityViolation(format!(
            "inf over K of w(T) is {inf_late:e}"
        )));
    }
    Ok(HarnackEstimate {
        k_lo: k.lo().as_f64(),
        k_hi: k.hi().as_f64(),
        t_prime: t_prime.as_f64(),
        t_end: t_end.as_f64(),
        sup_early: sup_early.as_f64(),
        inf_late: inf_late.as_f64(),
        ratio: (sup_early / inf_late).as_f64(),
    })
}

/// `sup_{[τ, T] × I} |w| / ‖w(0)‖_{L¹}`.
pub fn sup_bound_probe<T: Real>(nu: T, coeff: &BoundedCoefficient<T>, w0: &Field<T>, tau: T, t_end: T) -> Result<T> {
    let m0 = nonzero_l1(w0)?;
    if !(tau > T::zero() && tau < t_end) {
        return Err(Error::precondition(format!("need 0 < tau < T, got tau = {tau}, T = {t_end}")));
    }
    let segments = solve_segments(nu, coeff, w0, &[tau, t_end])?;
    let sup = segments[1]
        .frames()
        .iter()
        .map(norm_linf)
        .fold(T::zero(), T::max);
    Ok(sup / m0)
}
