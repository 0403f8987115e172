use super::{frame_count, Stepping};
use crate::error::{Error, Result};
use crate::grid::{inner_product, Field, Grid, Trajectory};
use crate::scalar::Real;
use crate::tridiag::Tridiagonal;

/// Which of the two linear equations a [`LinearProblem`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `∂ₜw − ν∂ₓ²w + ∂ₓ(a w) = 0` forward from `w(t_start)`.
    Forward,
    /// `∂ₜz + ν∂ₓ²z + a ∂ₓz = 0` backward from `z(t_end)`.
    BackwardDual,
}

/// Linear problem driven by a sampled coefficient `a(t, x)`.
///
/// `datum` is the initial value for [`Direction::Forward`] and the terminal
/// value for [`Direction::BackwardDual`]; its end values are clipped to zero.
#[derive(Debug, Clone)]
pub struct LinearProblem<T> {
    pub nu: T,
    pub coeff: Trajectory<T>,
    pub datum: Field<T>,
    pub direction: Direction,
    pub t_start: T,
    pub t_end: T,
    pub dt: T,
    pub stepping: Stepping,
}

impl<T: Real> LinearProblem<T> {
    pub fn forward(nu: T, coeff: Trajectory<T>, w0: Field<T>, t_start: T, t_end: T, dt: T) -> Self {
        Self {
            nu,
            coeff,
            datum: w0,
            direction: Direction::Forward,
            t_start,
            t_end,
            dt,
            stepping: Stepping::default(),
        }
    }

    pub fn dual(nu: T, coeff: Trajectory<T>, z_end: Field<T>, t_start: T, t_end: T, dt: T) -> Self {
        Self {
            direction: Direction::BackwardDual,
            ..Self::forward(nu, coeff, z_end, t_start, t_end, dt)
        }
    }

    pub fn with_stepping(mut self, stepping: Stepping) -> Self {
        self.stepping = stepping;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.nu > T::zero()) {
            return Err(Error::precondition(format!("nu = {} must be positive", self.nu)));
        }
        if self.coeff.grid() != self.datum.grid() {
            return Err(Error::precondition("coefficient and datum live on different grids"));
        }
        if !self.coeff.covers(self.t_start, self.t_end) {
            return Err(Error::precondition(format!(
                "coefficient covers [{}, {}], problem needs [{}, {}]",
                self.coeff.t0(),
                self.coeff.t_end(),
                self.t_start,
                self.t_end
            )));
        }
        frame_count(self.t_start, self.t_end, self.dt).map(|_| ())
    }

    fn substeps(&self, frame_dt: T) -> usize {
        match self.stepping {
            Stepping::Fixed => 1,
            Stepping::Monotone => {
                let dx = self.datum.grid().dx();
                let m = (frame_dt * self.nu / (dx * dx) - T::lit(1e-9)).ceil().max(T::one());
                m.to_usize().unwrap_or(1)
            }
        }
    }
}

/// `max |a| dx / ν` over the coefficient; the linear schemes are monotone when it is at most 2.
pub fn cell_peclet<T: Real>(coeff: &Trajectory<T>, nu: T) -> T {
    let sup = coeff
        .frames()
        .iter()
        .flat_map(|f| f.values().iter())
        .fold(T::zero(), |m, v| m.max(v.abs()));
    sup * coeff.grid().dx() / nu
}

/// Assembles the interior operator `A(t)` of the forward equation (`transpose == false`)
/// or its transpose, the operator of the dual equation in reversed time.
fn assemble_operator<T: Real>(a: &[T], nu: T, dx: T, transpose: bool, op: &mut Tridiagonal<T>) {
    let n = a.len() - 1;
    let diff = nu / (dx * dx);
    let adv = T::one() / (T::lit(2.0) * dx);
    for i in 1..n {
        let r = i - 1;
        op.diag[r] = -T::lit(2.0) * diff;
        if transpose {
            op.lower[r] = diff - a[i] * adv;
            op.upper[r] = diff + a[i] * adv;
        } else {
            op.lower[r] = diff + a[i - 1] * adv;
            op.upper[r] = diff - a[i + 1] * adv;
        }
    }
}

struct CrankNicolson<T> {
    explicit: Tridiagonal<T>,
    implicit: Tridiagonal<T>,
    a_buf: Vec<T>,
    rhs: Vec<T>,
    scratch: Vec<T>,
}

impl<T: Real> CrankNicolson<T> {
    fn new(grid: &Grid<T>) -> Self {
        let m = grid.n_cells() - 1;
        Self {
            explicit: Tridiagonal::zeros(m),
            implicit: Tridiagonal::zeros(m),
            a_buf: vec![T::zero(); grid.n_nodes()],
            rhs: vec![T::zero(); m],
            scratch: Vec::new(),
        }
    }

    /// `(I − h/2 A(t_new)) y_new = (I + h/2 A(t_old)) y_old` on interior nodes.
    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, p: &LinearProblem<T>, y: &mut [T], t_old: T, t_new: T, transpose: bool) -> Result<()> {
        let dx = p.datum.grid().dx();
        let h = (t_new - t_old).abs();
        let half_h = h * T::lit(0.5);

        p.coeff.sample_into(t_old, &mut self.a_buf);
        assemble_operator(&self.a_buf, p.nu, dx, transpose, &mut self.explicit);
        let m = self.rhs.len();
        let interior = &y[1..=m];
        self.explicit.apply(interior, &mut self.rhs);
        for (r, v) in self.rhs.iter_mut().zip(interior) {
            *r = *v + half_h * *r;
        }

        p.coeff.sample_into(t_new, &mut self.a_buf);
        assemble_operator(&self.a_buf, p.nu, dx, transpose, &mut self.implicit);
        for r in 0..m {
            self.implicit.lower[r] = -half_h * self.implicit.lower[r];
            self.implicit.upper[r] = -half_h * self.implicit.upper[r];
            self.implicit.diag[r] = T::one() - half_h * self.implicit.diag[r];
        }
        self.implicit
            .solve_in_place(&mut self.rhs, &mut self.scratch)
            .map_err(|pivot| Error::SingularSystem {
                time: t_new.as_f64(),
                pivot,
            })?;
        y[1..=m].copy_from_slice(&self.rhs);
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericBlowup { time: t_new.as_f64() });
        }
        Ok(())
    }
}

/// Integrates `∂ₜw − ν∂ₓ²w + ∂ₓ(a w) = 0` with Dirichlet conditions.
///
/// The flux `∂ₓ(a w)` is the centred difference of the nodal product, which
/// makes column sums of the discrete operator vanish: the discrete L¹ norm
/// can only leak through the boundary.
pub fn solve_linear<T: Real>(p: &LinearProblem<T>) -> Result<Trajectory<T>> {
    if p.direction != Direction::Forward {
        return Err(Error::precondition("solve_linear expects a forward problem"));
    }
    p.validate()?;
    let grid = *p.datum.grid();
    let (n_frames, dt) = frame_count(p.t_start, p.t_end, p.dt)?;
    let m = p.substeps(dt);
    let h = dt / T::from_usize_lossy(m);

    let mut traj = Trajectory::new(grid, p.t_start, dt)?;
    let mut w = p.datum.clone().into_dirichlet().into_values();
    traj.push(Field::from_values(grid, w.clone())?)?;
    let mut cn = CrankNicolson::new(&grid);
    for k in 0..n_frames {
        let t_frame = traj.time(k);
        for j in 0..m {
            let t_old = t_frame + T::from_usize_lossy(j) * h;
            let t_new = if j + 1 == m { traj.time(k + 1) } else { t_old + h };
            cn.step(p, &mut w, t_old, t_new, false)?;
        }
        traj.push(Field::from_values(grid, w.clone())?)?;
    }
    Ok(traj)
}

/// Integrates the dual equation `∂ₜz + ν∂ₓ²z + a∂ₓz = 0` backward from
/// `z(t_end) = datum`. The returned frames are ordered by increasing time.
///
/// The spatial operator is the exact transpose of the one used by
/// [`solve_linear`], so `(w(t), z(t))` is conserved up to the time
/// discretisation error.
pub fn solve_dual<T: Real>(p: &LinearProblem<T>) -> Result<Trajectory<T>> {
    if p.direction != Direction::BackwardDual {
        return Err(Error::precondition("solve_dual expects a backward dual problem"));
    }
    p.validate()?;
    let grid = *p.datum.grid();
    let (n_frames, dt) = frame_count(p.t_start, p.t_end, p.dt)?;
    let m = p.substeps(dt);
    let h = dt / T::from_usize_lossy(m);
    let time = |k: usize| p.t_start + T::from_usize_lossy(k) * dt;

    let mut z = p.datum.clone().into_dirichlet().into_values();
    let mut frames = Vec::with_capacity(n_frames + 1);
    frames.push(Field::from_values(grid, z.clone())?);
    let mut cn = CrankNicolson::new(&grid);
    for k in (0..n_frames).rev() {
        let t_frame = time(k + 1);
        for j in 0..m {
            let t_old = t_frame - T::from_usize_lossy(j) * h;
            let t_new = if j + 1 == m { time(k) } else { t_old - h };
            cn.step(p, &mut z, t_old, t_new, true)?;
        }
        frames.push(Field::from_values(grid, z.clone())?);
    }
    let mut traj = Trajectory::new(grid, p.t_start, dt)?;
    for f in frames.into_iter().rev() {
        traj.push(f)?;
    }
    Ok(traj)
}

/// Largest relative change of the pairing `(w(t), z(t))` over the common frames.
pub fn duality_pairing_drift<T: Real>(w: &Trajectory<T>, z: &Trajectory<T>) -> Result<T> {
    if w.grid() != z.grid() {
        return Err(Error::precondition("pairing drift: grids differ"));
    }
    if w.len() != z.len() || w.is_empty() {
        return Err(Error::precondition("pairing drift: frame counts differ"));
    }
    let tol = w.dt() * T::lit(1e-9);
    if (w.t0() - z.t0()).abs() > tol || (w.dt() - z.dt()).abs() > tol {
        return Err(Error::precondition("pairing drift: time windows differ"));
    }
    let p0 = inner_product(w.first(), z.first());
    let denom = p0.abs().max(T::lit(1e-30));
    let drift = w
        .frames()
        .iter()
        .zip(z.frames())
        .map(|(a, b)| (inner_product(a, b) - p0).abs())
        .fold(T::zero(), T::max);
    Ok(drift / denom)
}
