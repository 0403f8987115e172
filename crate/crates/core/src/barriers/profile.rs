use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Interval, Trajectory};
use crate::scalar::Real;
use crate::solver::SpaceTimeFn;
use serde::Serialize;

/// Value and the derivatives entering the strong Burgers residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    pub u: T,
    pub u_t: T,
    pub u_x: T,
    pub u_xx: T,
}

/// A closed-form function of `(t, x)` with analytic derivatives.
pub trait Profile<T: Real>: Send + Sync {
    fn jet(&self, t: T, x: T) -> Result<Jet<T>>;

    fn eval(&self, t: T, x: T) -> Result<T> {
        self.jet(t, x).map(|j| j.u)
    }

    /// Samples `n_steps + 1` frames starting at `t0`.
    fn sample(&self, grid: Grid<T>, t0: T, dt: T, n_steps: usize) -> Result<Trajectory<T>> {
        let mut traj = Trajectory::new(grid, t0, dt)?;
        for k in 0..=n_steps {
            let t = traj.time(k);
            let vals = grid.nodes().map(|x| self.eval(t, x)).collect::<Result<Vec<_>>>()?;
            traj.push(Field::from_values(grid, vals)?)?;
        }
        Ok(traj)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierKind {
    /// `(B(B + x) + Lε) / (t + ε)`.
    GlobalSuper,
    /// `−(B(B − x) + Lε) / (t + ε)`.
    GlobalSub,
    /// `A / ((t + ε)(a − x + ε))`, a super-solution on `[0, T] × [0, a]`.
    LeftSuper,
}

/// Explicit barrier for the uncontrolled equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Barrier<T> {
    pub kind: BarrierKind,
    pub eps: T,
    /// `B_ε` for the global barriers, `A_ε` for the left one.
    pub coeff: T,
    /// Bound on `|u0|` (over the barrier's domain).
    pub l: T,
    /// Bound on `|u(t, a)|`; only used by the left barrier.
    pub n: T,
    pub t_end: T,
    pub a: T,
    pub nu: T,
    pub h_inf: T,
}

/// `B_ε = 1 + ‖h‖^{1/3} (T + ε)^{2/3}`.
pub fn global_coefficient<T: Real>(h_inf: T, t_end: T, eps: T) -> T {
    T::one() + h_inf.cbrt() * (t_end + eps).powf(T::lit(2.0 / 3.0))
}

/// `ε → 0` limit of the global barrier at `t = T`: `B₀(B₀ + 1) / T`.
pub fn global_limit_bound<T: Real>(h_inf: T, t_end: T) -> T {
    let b = global_coefficient(h_inf, t_end, T::zero());
    b * (b + T::one()) / t_end
}

/// `Λ = max(4ν(T+1) + 2(a+1)², (2(T+1)²(a+1)³‖h‖)^{1/2})`.
pub fn left_lambda<T: Real>(nu: T, t_end: T, a: T, h_inf: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let structural = T::lit(4.0) * nu * (t_end + one) + two * (a + one) * (a + one);
    let forcing = (two * (t_end + one).powi(2) * (a + one).powi(3) * h_inf).sqrt();
    structural.max(forcing)
}

/// `ε → 0` limit of the left barrier at `(T, δ)`: `Λ / (T (a − δ))`.
pub fn left_limit_bound<T: Real>(nu: T, t_end: T, a: T, delta: T, h_inf: T) -> T {
    left_lambda(nu, t_end, a, h_inf) / (t_end * (a - delta))
}

impl<T: Real> Barrier<T> {
    fn check_common(eps: T, l: T, t_end: T, h_inf: T) -> Result<()> {
        if !(eps >= T::zero() && l >= T::zero() && t_end > T::zero() && h_inf >= T::zero()) {
            return Err(Error::precondition(format!(
                "barrier needs eps, L, ‖h‖ ≥ 0 and T > 0 (eps = {eps}, L = {l}, T = {t_end}, h = {h_inf})"
            )));
        }
        Ok(())
    }

    pub fn global_super(eps: T, l: T, h_inf: T, t_end: T) -> Result<Self> {
        Self::check_common(eps, l, t_end, h_inf)?;
        Ok(Self {
            kind: BarrierKind::GlobalSuper,
            eps,
            coeff: global_coefficient(h_inf, t_end, eps),
            l,
            n: T::zero(),
            t_end,
            a: T::one(),
            nu: T::zero(),
            h_inf,
        })
    }

    pub fn global_sub(eps: T, l: T, h_inf: T, t_end: T) -> Result<Self> {
        Ok(Self {
            kind: BarrierKind::GlobalSub,
            ..Self::global_super(eps, l, h_inf, t_end)?
        })
    }

    /// `A_ε = Λ + ε (L (a + ε) + N (T + ε))`.
    pub fn left_super(eps: T, a: T, nu: T, t_end: T, l: T, n: T, h_inf: T) -> Result<Self> {
        Self::check_common(eps, l, t_end, h_inf)?;
        if !(a > T::zero() && a < T::one() && nu > T::zero() && n >= T::zero()) {
            return Err(Error::precondition(format!(
                "left barrier needs 0 < a < 1, nu > 0, N ≥ 0 (a = {a}, nu = {nu}, N = {n})"
            )));
        }
        let coeff = left_lambda(nu, t_end, a, h_inf) + eps * (l * (a + eps) + n * (t_end + eps));
        Ok(Self {
            kind: BarrierKind::LeftSuper,
            eps,
            coeff,
            l,
            n,
            t_end,
            a,
            nu,
            h_inf,
        })
    }
}

impl<T: Real> Profile<T> for Barrier<T> {
    fn jet(&self, t: T, x: T) -> Result<Jet<T>> {
        let s = t + self.eps;
        if !(s > T::zero()) {
            return Err(Error::Domain(format!("barrier singular at t = {t} (t + eps = {s})")));
        }
        let b = self.coeff;
        match self.kind {
            BarrierKind::GlobalSuper | BarrierKind::GlobalSub => {
                let (sign, shift) = match self.kind {
                    BarrierKind::GlobalSuper => (T::one(), x),
                    _ => (-T::one(), -x),
                };
                let u = sign * (b * (b + shift) + self.l * self.eps) / s;
                Ok(Jet {
                    u,
                    u_t: -u / s,
                    u_x: b / s,
                    u_xx: T::zero(),
                })
            }
            BarrierKind::LeftSuper => {
                let d = self.a - x + self.eps;
                if !(d > T::zero()) {
                    return Err(Error::Domain(format!("left barrier singular at x = {x}")));
                }
                let u = b / (s * d);
                Ok(Jet {
                    u,
                    u_t: -u / s,
                    u_x: u / d,
                    u_xx: T::lit(2.0) * u / (d * d),
                })
            }
        }
    }
}

/// Range of the scaled strong residual
/// `(∂ₜu − ν∂ₓ²u + u∂ₓu − h) / (1 + |∂ₜu| + |ν∂ₓ²u| + |u∂ₓu| + |h|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualRange {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

/// Evaluates the scaled strong residual of `profile` on a lattice four times
/// finer than `grid` and `dt`, covering `[t0, t1] × sub`.
#[allow(clippy::too_many_arguments)]
pub fn residual_range<T: Real, P: Profile<T> + ?Sized>(
    profile: &P,
    nu: T,
    h: &SpaceTimeFn<T>,
    grid: &Grid<T>,
    dt: T,
    sub: Interval<T>,
    t0: T,
    t1: T,
) -> Result<ResidualRange> {
    if !(t1 > t0) || !(dt > T::zero()) {
        return Err(Error::precondition("residual check needs t1 > t0 and dt > 0"));
    }
    let refine = T::lit(4.0);
    let nx = (sub.length() / grid.dx() * refine - T::lit(1e-9)).ceil().max(T::one());
    let nt = ((t1 - t0) / dt * refine - T::lit(1e-9)).ceil().max(T::one());
    let nx = nx.to_usize().unwrap_or(1);
    let nt = nt.to_usize().unwrap_or(1);
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for k in 0..=nt {
        let t = t0 + (t1 - t0) * T::from_usize_lossy(k) / T::from_usize_lossy(nt);
        for j in 0..=nx {
            let x = sub.lo() + sub.length() * T::from_usize_lossy(j) / T::from_usize_lossy(nx);
            let jet = profile.jet(t, x)?;
            let hv = h.eval(t, x);
            let diff = nu * jet.u_xx;
            let adv = jet.u * jet.u_x;
            let r = jet.u_t - diff + adv - hv;
            let scale = T::one() + jet.u_t.abs() + diff.abs() + adv.abs() + hv.abs();
            let v = (r / scale).as_f64();
            min = min.min(v);
            max = max.max(v);
        }
    }
    Ok(ResidualRange {
        min,
        max,
        samples: (nt + 1) * (nx + 1),
    })
}

/// Minimum scaled residual; `≥ −1e-10` certifies a super-solution on the samples.
#[allow(clippy::too_many_arguments)]
pub fn check_supersolution<T: Real, P: Profile<T> + ?Sized>(
    profile: &P,
    nu: T,
    h: &SpaceTimeFn<T>,
    grid: &Grid<T>,
    dt: T,
    sub: Interval<T>,
    t0: T,
    t1: T,
) -> Result<f64> {
    residual_range(profile, nu, h, grid, dt, sub, t0, t1).map(|r| r.min)
}

/// Maximum scaled residual; `≤ 1e-10` certifies a sub-solution on the samples.
#[allow(clippy::too_many_arguments)]
pub fn check_subsolution<T: Real, P: Profile<T> + ?Sized>(
    profile: &P,
    nu: T,
    h: &SpaceTimeFn<T>,
    grid: &Grid<T>,
    dt: T,
    sub: Interval<T>,
    t0: T,
    t1: T,
) -> Result<f64> {
    residual_range(profile, nu, h, grid, dt, sub, t0, t1).map(|r| r.max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct Zero;
    impl Profile<f64> for Zero {
        fn jet(&self, _: f64, _: f64) -> Result<Jet<f64>> {
            Ok(Jet {
                u: 0.0,
                u_t: 0.0,
                u_x: 0.0,
                u_xx: 0.0,
            })
        }
    }

    fn grid() -> Grid<f64> {
        Grid::new(64).unwrap()
    }

    #[test]
    fn left_limit_reference_value() {
        assert_relative_eq!(left_limit_bound(0.1, 1.0, 0.5, 0.25, 0.0), 21.2, epsilon = 1e-12);
        assert_relative_eq!(left_lambda(0.1, 1.0, 0.5, 0.0), 5.3, epsilon = 1e-12);
    }

    #[test]
    fn global_limit_is_two_without_forcing() {
        assert_relative_eq!(global_limit_bound(0.0, 1.0), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn global_barriers_have_the_right_sign() {
        let g = grid();
        let h = SpaceTimeFn::zero();
        for &eps in &[1.0, 0.1, 0.01] {
            let up = Barrier::global_super(eps, 5.0, 0.0, 1.0).unwrap();
            let lo = Barrier::global_sub(eps, 5.0, 0.0, 1.0).unwrap();
            let r_up = check_supersolution(&up, 0.1, &h, &g, 1.0 / 64.0, Interval::unit(), 0.0, 1.0).unwrap();
            let r_lo = check_subsolution(&lo, 0.1, &h, &g, 1.0 / 64.0, Interval::unit(), 0.0, 1.0).unwrap();
            assert!(r_up >= -1e-10, "eps {eps}: {r_up}");
            assert!(r_lo <= 1e-10, "eps {eps}: {r_lo}");
        }
    }

    #[test]
    fn global_barriers_with_forcing() {
        let g = grid();
        let h = SpaceTimeFn::new(|t: f64, x: f64| 3.0 * (5.0 * x + t).sin());
        let up = Barrier::global_super(0.1, 2.0, 3.0, 2.0).unwrap();
        let lo = Barrier::global_sub(0.1, 2.0, 3.0, 2.0).unwrap();
        assert!(check_supersolution(&up, 0.5, &h, &g, 1.0 / 64.0, Interval::unit(), 0.0, 2.0).unwrap() >= -1e-10);
        assert!(check_subsolution(&lo, 0.5, &h, &g, 1.0 / 64.0, Interval::unit(), 0.0, 2.0).unwrap() <= 1e-10);
    }

    #[test]
    fn left_barrier_is_super_solution() {
        let g = grid();
        let sub = Interval::new(0.0, 0.5).unwrap();
        let b = Barrier::left_super(0.05, 0.5, 0.1, 1.0, 10.0, 3.0, 0.0).unwrap();
        let r = check_supersolution(&b, 0.1, &SpaceTimeFn::zero(), &g, 1.0 / 64.0, sub, 0.0, 1.0).unwrap();
        assert!(r >= -1e-10, "{r}");
        let h = SpaceTimeFn::new(|_, _| 4.0);
        let bh = Barrier::left_super(0.05, 0.5, 0.1, 1.0, 10.0, 3.0, 4.0).unwrap();
        assert!(check_supersolution(&bh, 0.1, &h, &g, 1.0 / 64.0, sub, 0.0, 1.0).unwrap() >= -1e-10);
    }

    #[test]
    fn zero_profile_has_zero_residual() {
        let g = grid();
        let r = residual_range(&Zero, 0.1, &SpaceTimeFn::zero(), &g, 0.1, Interval::unit(), 0.0, 1.0).unwrap();
        assert_eq!((r.min, r.max), (0.0, 0.0));
        assert_eq!(r.samples, 41 * 257);
    }

    #[test]
    fn singular_evaluation_is_domain_error() {
        let b = Barrier::global_super(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(b.jet(0.0, 0.5), Err(Error::Domain(_))));
        let l = Barrier::left_super(0.0, 0.5, 0.1, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(l.jet(0.5, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let b = Barrier::left_super(0.1, 0.5, 0.1, 1.0, 2.0, 1.0, 0.0).unwrap();
        let (t, x, e) = (0.3, 0.2, 1e-5);
        let j = b.jet(t, x).unwrap();
        let f = |t, x| b.eval(t, x).unwrap();
        assert_relative_eq!(j.u_t, (f(t + e, x) - f(t - e, x)) / (2.0 * e), max_relative = 1e-7);
        assert_relative_eq!(j.u_x, (f(t, x + e) - f(t, x - e)) / (2.0 * e), max_relative = 1e-7);
        assert_relative_eq!(j.u_xx, (f(t, x + e) - 2.0 * j.u + f(t, x - e)) / (e * e), max_relative = 1e-4);
    }
}
