use super::{frame_count, SpaceTimeFn, Stepping};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid, Trajectory};
use crate::scalar::Real;
use crate::tridiag::Tridiagonal;

const MAX_NEWTON_ITERATIONS: usize = 50;
const MAX_DAMPING_HALVINGS: usize = 20;
const MAX_STEP_HALVINGS: usize = 10;

/// Initial-boundary value problem `∂ₜu − ν∂ₓ²u + u∂ₓu = h + ζ`, `u = 0` at `x ∈ {0, 1}`.
#[derive(Debug, Clone)]
pub struct BurgersProblem<T> {
    pub nu: T,
    pub forcing: SpaceTimeFn<T>,
    pub control: Option<SpaceTimeFn<T>>,
    pub u0: Field<T>,
    pub t_start: T,
    pub t_end: T,
    /// Output frame spacing.
    pub dt: T,
    pub stepping: Stepping,
    /// Raise face viscosity to `|u| dx / 2` where the mesh does not resolve
    /// the local cell Péclet number. Inactive whenever `|u| dx ≤ 2ν`.
    pub peclet_guard: bool,
}

impl<T: Real> BurgersProblem<T> {
    /// Unforced problem on `[t_start, t_end]` with the default frame spacing `dt = dx`.
    pub fn new(nu: T, u0: Field<T>, t_start: T, t_end: T) -> Self {
        let dt = u0.grid().dx();
        Self {
            nu,
            forcing: SpaceTimeFn::zero(),
            control: None,
            u0,
            t_start,
            t_end,
            dt,
            stepping: Stepping::default(),
            peclet_guard: true,
        }
    }

    pub fn with_forcing(mut self, h: SpaceTimeFn<T>) -> Self {
        self.forcing = h;
        self
    }

    pub fn with_control(mut self, zeta: SpaceTimeFn<T>) -> Self {
        self.control = Some(zeta);
        self
    }

    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_stepping(mut self, stepping: Stepping) -> Self {
        self.stepping = stepping;
        self
    }

    pub fn with_peclet_guard(mut self, on: bool) -> Self {
        self.peclet_guard = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > T::zero()) {
            return Err(Error::precondition(format!("nu = {} must be positive", self.nu)));
        }
        if !self.u0.is_dirichlet() {
            return Err(Error::precondition("u0 must vanish at x = 0 and x = 1"));
        }
        if self.u0.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::precondition("u0 has non-finite values"));
        }
        frame_count(self.t_start, self.t_end, self.dt).map(|_| ())
    }
}

/// Integrates a [`BurgersProblem`] and returns one frame per `dt`.
///
/// Conservative centred flux `∂ₓ(u²/2)`, 3-point diffusion, Crank–Nicolson
/// in time with forcing sampled at half steps. Each step is a Newton
/// iteration on the tridiagonal Jacobian, stopped at a residual ∞-norm of
/// `1e-11` relative to the size of the step's terms.
pub fn solve_burgers<T: Real>(p: &BurgersProblem<T>) -> Result<Trajectory<T>> {
    p.validate()?;
    let grid = *p.u0.grid();
    let (n_frames, dt) = frame_count(p.t_start, p.t_end, p.dt)?;
    let mut traj = Trajectory::new(grid, p.t_start, dt)?;
    traj.push(p.u0.clone())?;

    let mut stepper = Stepper::new(p, grid);
    let mut u = p.u0.values().to_vec();
    for k in 0..n_frames {
        let t_from = traj.time(k);
        let t_to = traj.time(k + 1);
        stepper.advance(&mut u, t_from, t_to, dt)?;
        traj.push(Field::from_values(grid, u.clone())?)?;
    }
    Ok(traj)
}

struct Stepper<'a, T> {
    p: &'a BurgersProblem<T>,
    grid: Grid<T>,
    source: Vec<T>,
    scratch: Vec<T>,
    l_old: Vec<T>,
    l_new: Vec<T>,
    residual: Vec<T>,
    trial: Vec<T>,
    jac: Tridiagonal<T>,
}

impl<'a, T: Real> Stepper<'a, T> {
    fn new(p: &'a BurgersProblem<T>, grid: Grid<T>) -> Self {
        let nn = grid.n_nodes();
        Self {
            p,
            grid,
            source: vec![T::zero(); nn],
            scratch: vec![T::zero(); nn],
            l_old: vec![T::zero(); nn],
            l_new: vec![T::zero(); nn],
            residual: vec![T::zero(); nn],
            trial: vec![T::zero(); nn],
            jac: Tridiagonal::zeros(grid.n_cells() - 1),
        }
    }

    #[inline]
    fn face_viscosity(&self, ul: T, ur: T) -> T {
        let nu = self.p.nu;
        if self.p.peclet_guard {
            nu.max(ul.abs().max(ur.abs()) * self.grid.dx() / T::lit(2.0))
        } else {
            nu
        }
    }

    /// Derivatives of the face viscosity with respect to the left and right node values.
    #[inline]
    fn face_viscosity_grad(&self, ul: T, ur: T) -> (T, T) {
        if !self.p.peclet_guard {
            return (T::zero(), T::zero());
        }
        let c = self.grid.dx() / T::lit(2.0);
        let (al, ar) = (ul.abs(), ur.abs());
        if al.max(ar) * c <= self.p.nu {
            (T::zero(), T::zero())
        } else if al >= ar {
            (ul.signum() * c, T::zero())
        } else {
            (T::zero(), ur.signum() * c)
        }
    }

    fn max_viscosity(&self, u: &[T]) -> T {
        u.windows(2)
            .fold(self.p.nu, |m, w| m.max(self.face_viscosity(w[0], w[1])))
    }

    /// Spatial operator `L(u) = ∂ₓ(ν∂ₓu) − ∂ₓ(u²/2)` on interior nodes.
    #[allow(clippy::needless_range_loop)]
    fn operator(&self, u: &[T], out: &mut [T]) {
        let n = self.grid.n_cells();
        let dx = self.grid.dx();
        let quarter = T::lit(0.25);
        let face = |j: usize| {
            let (ul, ur) = (u[j], u[j + 1]);
            let g = self.face_viscosity(ul, ur) * (ur - ul) / dx;
            let f = quarter * (ul * ul + ur * ur);
            g - f
        };
        let mut left = face(0);
        out[0] = T::zero();
        for i in 1..n {
            let right = face(i);
            out[i] = (right - left) / dx;
            left = right;
        }
        out[n] = T::zero();
    }

    fn assemble_jacobian(&mut self, u: &[T], h: T) {
        let n = self.grid.n_cells();
        let dx = self.grid.dx();
        let half = T::lit(0.5);
        let coef = h * half / dx;
        // derivatives of the face quantity G_j − F_j with respect to u_j and u_{j+1}
        let face_grad = |j: usize| {
            let (ul, ur) = (u[j], u[j + 1]);
            let nu_f = self.face_viscosity(ul, ur);
            let (dnl, dnr) = self.face_viscosity_grad(ul, ur);
            let jump = ur - ul;
            let d_left = (-nu_f + dnl * jump) / dx - half * ul;
            let d_right = (nu_f + dnr * jump) / dx - half * ur;
            (d_left, d_right)
        };
        let grads: Vec<(T, T)> = (0..n).map(face_grad).collect();
        for i in 1..n {
            let (left, right) = (grads[i - 1], grads[i]);
            let r = i - 1;
            // dL_i/du_{i-1}, dL_i/du_i, dL_i/du_{i+1}
            self.jac.lower[r] = -coef * (-left.0);
            self.jac.diag[r] = T::one() - coef * (right.0 - left.1);
            self.jac.upper[r] = -coef * right.1;
        }
    }

    fn residual_into(&mut self, u_new: &[T], u_old: &[T], h: T) -> T {
        let n = self.grid.n_cells();
        let mut l_new = std::mem::take(&mut self.l_new);
        self.operator(u_new, &mut l_new);
        let half = T::lit(0.5);
        let mut norm = T::zero();
        for i in 1..n {
            let r = u_new[i] - u_old[i] - h * half * (l_new[i] + self.l_old[i]) - h * self.source[i];
            self.residual[i] = r;
            norm = if r.is_finite() { norm.max(r.abs()) } else { T::infinity() };
        }
        self.l_new = l_new;
        norm
    }

    /// One Crank–Nicolson step `u(t) → u(t + h)` by damped Newton iteration.
    fn step(&mut self, u: &mut [T], t: T, h: T) -> Result<()> {
        let n = self.grid.n_cells();
        let t_mid = t + h * T::lit(0.5);
        let grid = self.grid;
        self.p.forcing.sample_into(t_mid, &grid, &mut self.source);
        if let Some(zeta) = &self.p.control {
            zeta.sample_into(t_mid, &grid, &mut self.scratch);
            for (s, z) in self.source.iter_mut().zip(&self.scratch) {
                *s += *z;
            }
        }
        let mut l_old = std::mem::take(&mut self.l_old);
        self.operator(u, &mut l_old);
        self.l_old = l_old;

        let dx = grid.dx();
        let u_sup = u.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let s_sup = self.source.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let nu_max = self.max_viscosity(u);
        let scale = T::one()
            + u_sup
            + h * (T::lit(4.0) * nu_max * u_sup / (dx * dx) + u_sup * u_sup / dx)
            + h * s_sup;
        let tol = T::newton_tolerance() * scale;

        let u_old = u.to_vec();
        let mut res = self.residual_into(u, &u_old, h);
        let mut iterations = 0;
        let mut delta = vec![T::zero(); n - 1];
        // Always take one Newton step: a loose tolerance must not turn the scheme explicit.
        while res > tol || iterations == 0 {
            if iterations == MAX_NEWTON_ITERATIONS || !res.is_finite() {
                return Err(Error::StepFailure {
                    time: t.as_f64(),
                    iterations,
                    residual: res.as_f64(),
                });
            }
            iterations += 1;
            self.assemble_jacobian(u, h);
            for i in 1..n {
                delta[i - 1] = -self.residual[i];
            }
            let mut scratch = std::mem::take(&mut self.scratch);
            let solved = self.jac.solve_in_place(&mut delta, &mut scratch);
            self.scratch = scratch;
            solved.map_err(|pivot| Error::SingularSystem {
                time: t.as_f64(),
                pivot,
            })?;

            let mut lambda = T::one();
            let mut trial = std::mem::take(&mut self.trial);
            let mut accepted = T::infinity();
            for _ in 0..=MAX_DAMPING_HALVINGS {
                trial.copy_from_slice(u);
                for i in 1..n {
                    trial[i] = u[i] + lambda * delta[i - 1];
                }
                accepted = self.residual_into(&trial, &u_old, h);
                if accepted <= res {
                    break;
                }
                lambda *= T::lit(0.5);
            }
            u.copy_from_slice(&trial);
            self.trial = trial;
            res = accepted;
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericBlowup { time: (t + h).as_f64() });
        }
        Ok(())
    }

    /// Advances from one output frame to the next, subdividing as the stepping mode requires.
    fn advance(&mut self, u: &mut [T], t_from: T, t_to: T, frame_dt: T) -> Result<()> {
        let dx = self.grid.dx();
        let mut t = t_from;
        let end_slack = frame_dt * T::lit(1e-9);
        while t_to - t > end_slack {
            let remaining = t_to - t;
            let h_max = match self.p.stepping {
                Stepping::Monotone => dx * dx / self.max_viscosity(u),
                Stepping::Fixed => remaining,
            };
            let pieces = (remaining / h_max - T::lit(1e-9)).ceil().max(T::one());
            let mut h = remaining / pieces;
            let saved = u.to_vec();
            let mut halvings = 0;
            loop {
                match self.step(u, t, h) {
                    Ok(()) => break,
                    Err(Error::StepFailure { .. } | Error::SingularSystem { .. })
                        if halvings < MAX_STEP_HALVINGS =>
                    {
                        halvings += 1;
                        h *= T::lit(0.5);
                        u.copy_from_slice(&saved);
                    }
                    Err(e) => return Err(e),
                }
            }
            t = if t_to - (t + h) <= end_slack { t_to } else { t + h };
            if norm_linf_slice(u).is_nan() {
                return Err(Error::NumericBlowup { time: t.as_f64() });
            }
        }
        Ok(())
    }
}

fn norm_linf_slice<T: Real>(u: &[T]) -> T {
    u.iter().fold(T::zero(), |m, v| if v.is_nan() { T::nan() } else { m.max(v.abs()) })
}
