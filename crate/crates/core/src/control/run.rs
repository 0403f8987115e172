use super::CutoffSystem;
use crate::error::{Error, Result};
use crate::grid::{d_dx, norm_h1, norm_l1, trapezoid, Field, Trajectory};
use crate::scalar::Real;
use crate::solver::{solve_burgers, BurgersProblem, SpaceTimeFn, Stepping};
use serde::Serialize;
use std::fmt::Write as _;

/// Below this initial L¹ distance the run is treated as already on target.
const ZERO_ERROR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleKind {
    Controlled,
    Free,
}

impl CycleKind {
    pub fn of(k: usize) -> Self {
        if k.is_multiple_of(2) {
            CycleKind::Controlled
        } else {
            CycleKind::Free
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CycleKind::Controlled => "controlled",
            CycleKind::Free => "free",
        }
    }
}

/// Per-cycle summary of a controlled run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleRecord {
    pub k: usize,
    pub kind: CycleKind,
    /// `‖u(k) − û(k)‖_{L¹}`.
    pub l1_start: f64,
    /// `‖u(k+1) − û(k+1)‖_{L¹}`.
    pub l1_end: f64,
    /// `l1_end / l1_start`, zero when the cycle starts on target.
    pub ratio: f64,
    /// `∫ χ₀ |v(k+1) − û(k+1)|` on controlled cycles, `l1_end` otherwise.
    pub cutoff_l1_end: f64,
    /// `max_t ‖ζ(t)‖_{H¹}` over the cycle.
    pub zeta_h1_max: f64,
}

/// Inputs shared by every cycle of a controlled run.
#[derive(Debug, Clone)]
pub struct ControlSetup<T> {
    pub nu: T,
    pub forcing: SpaceTimeFn<T>,
    pub cutoffs: CutoffSystem<T>,
    pub n_cycles: usize,
    /// Frame spacing; `None` means `dx`. Rounded down so each cycle holds whole frames.
    pub dt: Option<T>,
    pub stepping: Stepping,
}

impl<T: Real> ControlSetup<T> {
    pub fn new(nu: T, cutoffs: CutoffSystem<T>, n_cycles: usize) -> Self {
        Self {
            nu,
            forcing: SpaceTimeFn::zero(),
            cutoffs,
            n_cycles,
            dt: None,
            stepping: Stepping::default(),
        }
    }

    pub fn with_forcing(mut self, h: SpaceTimeFn<T>) -> Self {
        self.forcing = h;
        self
    }

    pub fn with_dt(mut self, dt: T) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_stepping(mut self, stepping: Stepping) -> Self {
        self.stepping = stepping;
        self
    }

    fn burgers(&self, u0: Field<T>, t_start: T, t_end: T, dt: T) -> BurgersProblem<T> {
        BurgersProblem::new(self.nu, u0, t_start, t_end)
            .with_forcing(self.forcing.clone())
            .with_dt(dt)
            .with_stepping(self.stepping)
    }
}

/// Controlled solution `u`, reference `û`, control `ζ` and per-cycle records.
///
/// `ζ` frames at integer times hold the left limit, i.e. the value reached at
/// the end of the cycle that closes there.
#[derive(Debug, Clone)]
pub struct ControlledRun<T> {
    pub u: Trajectory<T>,
    pub u_hat: Trajectory<T>,
    pub zeta: Trajectory<T>,
    pub cycles: Vec<CycleRecord>,
    pub cutoffs: CutoffSystem<T>,
    /// Frames per unit cycle.
    pub steps_per_cycle: usize,
}

impl<T: Real> ControlledRun<T> {
    /// `‖u(k) − û(k)‖_{L¹}` for `k = 0, …, n_cycles`.
    pub fn errors_at_integers(&self) -> Vec<T> {
        let s = self.steps_per_cycle;
        (0..=self.cycles.len())
            .map(|k| norm_l1(&self.u.frame(k * s).sub(self.u_hat.frame(k * s))))
            .collect()
    }

    /// `‖u(t) − û(t)‖_{L¹}` on every frame.
    pub fn error_history(&self) -> Vec<T> {
        self.u
            .frames()
            .iter()
            .zip(self.u_hat.frames())
            .map(|(a, b)| norm_l1(&a.sub(b)))
            .collect()
    }

    /// `max_t (‖u(t) − û(t)‖_{L¹} − ‖u([t]) − û([t])‖_{L¹})`; non-positive when
    /// the error never exceeds its value at the last integer time.
    pub fn inter_cycle_excess(&self) -> T {
        let e = self.error_history();
        let s = self.steps_per_cycle;
        e.iter()
            .enumerate()
            .map(|(j, &v)| v - e[(j / s) * s])
            .fold(T::neg_infinity(), T::max)
    }

    /// Largest `|ζ|` at nodes outside the control support or in the first
    /// half of a controlled cycle.
    pub fn zeta_support_violation(&self) -> T {
        let s = self.steps_per_cycle;
        let support = self.cutoffs.support();
        let grid = self.zeta.grid();
        let mut worst = T::zero();
        for (j, frame) in self.zeta.frames().iter().enumerate() {
            // Frame at an integer time belongs to the cycle that ends there.
            let local = if j > 0 && j % s == 0 { s } else { j % s };
            let first_half = 2 * local <= s;
            for (i, &z) in frame.values().iter().enumerate() {
                let x = grid.x(i);
                if first_half || x <= support.lo() || x >= support.hi() {
                    worst = worst.max(z.abs());
                }
            }
        }
        worst
    }

    /// `max ‖ζ(t_{j+1}) − ζ(t_j)‖_{H¹} / dt` over consecutive frames inside a cycle.
    pub fn zeta_lipschitz(&self) -> T {
        let s = self.steps_per_cycle;
        let dt = self.zeta.dt();
        let mut worst = T::zero();
        for k in 0..self.cycles.len() {
            for j in k * s..(k + 1) * s {
                // The right limit at an odd cycle start is zero, not the stored left limit.
                let from = if j == k * s && k % 2 == 1 {
                    Field::zeros(*self.zeta.grid())
                } else {
                    self.zeta.frame(j).clone()
                };
                let jump = norm_h1(&self.zeta.frame(j + 1).sub(&from)) / dt;
                worst = worst.max(jump);
            }
        }
        worst
    }

    /// `max_t ‖u(t)‖_{H²}` over the controlled trajectory.
    pub fn max_h2(&self) -> T {
        self.u
            .frames()
            .iter()
            .map(crate::grid::norm_h2)
            .fold(T::zero(), T::max)
    }

    /// Cycle table with header `k,kind,l1_start,l1_end,ratio`.
    pub fn cycles_csv(&self) -> String {
        let mut out = String::from("k,kind,l1_start,l1_end,ratio\n");
        for c in &self.cycles {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e}",
                c.k,
                c.kind.as_str(),
                c.l1_start,
                c.l1_end,
                c.ratio
            );
        }
        out
    }
}

fn cycle_frames<T: Real>(dt: T) -> Result<usize> {
    if !(dt > T::zero()) || dt > T::one() {
        return Err(Error::precondition(format!("dt = {dt} must lie in (0, 1]")));
    }
    (T::one() / dt - T::lit(1e-9))
        .ceil()
        .to_usize()
        .ok_or_else(|| Error::precondition("too many frames per cycle"))
}

/// Runs the alternating controlled/free cycle construction for `n_cycles` unit cycles.
pub fn build_controlled_trajectory<T: Real>(
    u0: &Field<T>,
    u_hat0: &Field<T>,
    setup: &ControlSetup<T>,
) -> Result<ControlledRun<T>> {
    if u0.grid() != u_hat0.grid() {
        return Err(Error::precondition("u0 and u_hat0 live on different grids"));
    }
    if !u0.is_dirichlet() || !u_hat0.is_dirichlet() {
        return Err(Error::precondition("initial data must vanish at x = 0 and x = 1"));
    }
    if setup.n_cycles == 0 {
        return Err(Error::precondition("n_cycles must be at least 1"));
    }
    let grid = *u0.grid();
    let steps = cycle_frames(setup.dt.unwrap_or(grid.dx()))?;
    let dt = T::one() / T::from_usize_lossy(steps);
    let n_cycles = setup.n_cycles;
    let horizon = T::from_usize_lossy(n_cycles);

    let u_hat = solve_burgers(&setup.burgers(u_hat0.clone(), T::zero(), horizon, dt))?;
    let mut u = Trajectory::new(grid, T::zero(), dt)?;
    let mut zeta = Trajectory::new(grid, T::zero(), dt)?;
    u.push(u0.clone())?;
    zeta.push(Field::zeros(grid))?;
    let mut cycles = Vec::with_capacity(n_cycles);

    if norm_l1(&u0.sub(u_hat0)).as_f64() < ZERO_ERROR {
        for k in 0..n_cycles {
            for j in 1..=steps {
                u.push(u_hat.frame(k * steps + j).clone())?;
                zeta.push(Field::zeros(grid))?;
            }
            cycles.push(CycleRecord {
                k,
                kind: CycleKind::of(k),
                l1_start: 0.0,
                l1_end: 0.0,
                ratio: 0.0,
                cutoff_l1_end: 0.0,
                zeta_h1_max: 0.0,
            });
        }
        return Ok(ControlledRun {
            u,
            u_hat,
            zeta,
            cycles,
            cutoffs: setup.cutoffs,
            steps_per_cycle: steps,
        });
    }

    let chi0 = Field::from_fn(grid, |x| setup.cutoffs.chi0(x).0);
    for k in 0..n_cycles {
        let t_k = T::from_usize_lossy(k);
        let start = u.last().clone();
        let l1_start = norm_l1(&start.sub(u_hat.frame(k * steps)));
        let v = solve_burgers(&setup.burgers(start, t_k, t_k + T::one(), dt)).map_err(|e| e.in_cycle(k))?;
        let kind = CycleKind::of(k);
        let mut zeta_h1_max = T::zero();
        let cutoff_l1_end = match kind {
            CycleKind::Controlled => {
                let z = reconstruct_zeta(&v, &u_hat, &setup.cutoffs, k, setup.nu)?;
                for j in 1..=steps {
                    let tau = T::from_usize_lossy(j) * dt;
                    let uh = u_hat.frame(k * steps + j);
                    u.push(glue(uh, v.frame(j), &setup.cutoffs, tau))?;
                    zeta_h1_max = zeta_h1_max.max(norm_h1(z.frame(j)));
                    zeta.push(z.frame(j).clone())?;
                }
                let w_end = v.last().sub(u_hat.frame((k + 1) * steps));
                let weighted: Vec<T> = w_end
                    .values()
                    .iter()
                    .zip(chi0.values())
                    .map(|(w, c)| *c * w.abs())
                    .collect();
                trapezoid(&weighted, grid.dx())
            }
            CycleKind::Free => {
                for j in 1..=steps {
                    u.push(v.frame(j).clone())?;
                    zeta.push(Field::zeros(grid))?;
                }
                norm_l1(&v.last().sub(u_hat.frame((k + 1) * steps)))
            }
        };
        let l1_end = norm_l1(&u.last().sub(u_hat.frame((k + 1) * steps)));
        let ratio = if l1_start > T::zero() { l1_end / l1_start } else { T::zero() };
        cycles.push(CycleRecord {
            k,
            kind,
            l1_start: l1_start.as_f64(),
            l1_end: l1_end.as_f64(),
            ratio: ratio.as_f64(),
            cutoff_l1_end: cutoff_l1_end.as_f64(),
            zeta_h1_max: zeta_h1_max.as_f64(),
        });
    }

    Ok(ControlledRun {
        u,
        u_hat,
        zeta,
        cycles,
        cutoffs: setup.cutoffs,
        steps_per_cycle: steps,
    })
}

/// `û + χ(τ, ·)(v − û)` at one frame.
fn glue<T: Real>(u_hat: &Field<T>, v: &Field<T>, cs: &CutoffSystem<T>, tau: T) -> Field<T> {
    let grid = *u_hat.grid();
    let vals = u_hat
        .values()
        .iter()
        .zip(v.values())
        .enumerate()
        .map(|(i, (&h, &f))| h + cs.eval_chi(tau, grid.x(i)).value * (f - h))
        .collect();
    Field::from_values(grid, vals).expect("same grid")
}

/// Closed-form control on the even cycle `[k, k+1]`:
///
/// `ζ = −(χ(1−χ) w + 2ν ∂ₓχ) ∂ₓw + (∂ₜχ − ν ∂ₓ²χ + û ∂ₓχ + χ w ∂ₓχ) w`
///
/// with `w = v − û` and `χ = χ(t − k, x)`. Frames follow those of `v`.
pub fn reconstruct_zeta<T: Real>(
    v: &Trajectory<T>,
    u_hat: &Trajectory<T>,
    cs: &CutoffSystem<T>,
    k: usize,
    nu: T,
) -> Result<Trajectory<T>> {
    if !k.is_multiple_of(2) {
        return Err(Error::precondition(format!("cycle {k} is not a controlled cycle")));
    }
    if v.grid() != u_hat.grid() {
        return Err(Error::precondition("v and u_hat live on different grids"));
    }
    let t_k = T::from_usize_lossy(k);
    let tol = T::lit(1e-9);
    if (v.t0() - t_k).abs() > tol || (v.t_end() - t_k - T::one()).abs() > tol {
        return Err(Error::precondition(format!(
            "v spans [{}, {}], expected [{k}, {}]",
            v.t0(),
            v.t_end(),
            k + 1
        )));
    }
    if !u_hat.covers(v.t0(), v.t_end()) {
        return Err(Error::precondition("u_hat does not cover the cycle"));
    }
    let grid = *v.grid();
    let dx = grid.dx();
    let mut out = Trajectory::new(grid, v.t0(), v.dt())?;
    let mut uh = vec![T::zero(); grid.n_nodes()];
    for (j, vf) in v.frames().iter().enumerate() {
        let t = v.time(j);
        match u_hat.index_of(t) {
            Some(idx) => uh.copy_from_slice(u_hat.frame(idx).values()),
            None => u_hat.sample_into(t, &mut uh),
        }
        let tau = T::from_usize_lossy(j) * v.dt();
        let w: Vec<T> = vf.values().iter().zip(&uh).map(|(a, b)| *a - *b).collect();
        let wx = d_dx(&w, dx);
        let vals = (0..grid.n_nodes())
            .map(|i| {
                let c = cs.eval_chi(tau, grid.x(i));
                let first = (c.value * (T::one() - c.value) * w[i] + T::lit(2.0) * nu * c.dx) * wx[i];
                let second = (c.dt - nu * c.dxx + uh[i] * c.dx + c.value * w[i] * c.dx) * w[i];
                second - first
            })
            .collect();
        out.push(Field::from_values(grid, vals)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Interval};
    use std::f64::consts::PI;

    fn cutoffs() -> CutoffSystem<f64> {
        CutoffSystem::new(Interval::new(0.3, 0.7).unwrap(), Interval::new(0.4, 0.6).unwrap()).unwrap()
    }

    fn setup(n_cycles: usize) -> ControlSetup<f64> {
        ControlSetup::new(0.1, cutoffs(), n_cycles).with_forcing(SpaceTimeFn::new(|_, x: f64| 0.5 * (2.0 * PI * x).sin()))
    }

    #[test]
    fn identical_data_stay_on_reference() {
        let g = Grid::<f64>::new(32).unwrap();
        let u0 = Field::dirichlet_from_fn(g, |x| (PI * x).sin());
        let run = build_controlled_trajectory(&u0, &u0, &setup(2)).unwrap();
        assert!(run.cycles.iter().all(|c| c.l1_start == 0.0 && c.l1_end == 0.0));
        assert!(run.zeta.frames().iter().all(Field::is_zero));
        assert_eq!(run.u, run.u_hat);
    }

    #[test]
    fn cycle_structure_and_identities() {
        let g = Grid::<f64>::new(64).unwrap();
        let u0 = Field::dirichlet_from_fn(g, |x| 0.8 * (PI * x).sin());
        let uh0 = Field::dirichlet_from_fn(g, |x| -0.5 * (3.0 * PI * x).sin());
        let run = build_controlled_trajectory(&u0, &uh0, &setup(4)).unwrap();
        assert_eq!(run.steps_per_cycle, 64);
        assert_eq!(run.u.len(), 4 * 64 + 1);
        assert_eq!(run.zeta.len(), run.u.len());
        assert_eq!(run.zeta_support_violation(), 0.0);
        assert!(run.inter_cycle_excess() <= 1e-6);
        for c in &run.cycles {
            assert_eq!(c.kind, CycleKind::of(c.k));
            assert!((c.cutoff_l1_end - c.l1_end).abs() <= 1e-10);
            if c.kind == CycleKind::Controlled {
                assert!(c.ratio < 1.0);
                assert!(c.zeta_h1_max > 0.0);
            } else {
                assert_eq!(c.zeta_h1_max, 0.0);
            }
        }
        let e = run.errors_at_integers();
        assert_eq!(e.len(), 5);
        for w in run.cycles.windows(2) {
            assert_eq!(w[0].l1_end, w[1].l1_start);
        }
        let csv = run.cycles_csv();
        assert!(csv.starts_with("k,kind,l1_start,l1_end,ratio\n0,controlled,"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn zeta_vanishes_for_zero_difference() {
        let g = Grid::<f64>::new(16).unwrap();
        let v = Trajectory::from_fn(g, 0.0, 0.125, 8, |t, x| (1.0 + t) * (PI * x).sin()).unwrap();
        let z = reconstruct_zeta(&v, &v, &cutoffs(), 0, 0.1).unwrap();
        assert!(z.frames().iter().all(Field::is_zero));
    }

    #[test]
    fn reconstruct_rejects_odd_cycle_and_bad_window() {
        let g = Grid::<f64>::new(16).unwrap();
        let v = Trajectory::from_fn(g, 1.0, 0.125, 8, |_, _| 0.0).unwrap();
        assert!(reconstruct_zeta(&v, &v, &cutoffs(), 1, 0.1).is_err());
        assert!(reconstruct_zeta(&v, &v, &cutoffs(), 2, 0.1).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = Grid::<f64>::new(16).unwrap();
        let u0 = Field::dirichlet_from_fn(g, |x| (PI * x).sin());
        assert!(build_controlled_trajectory(&u0, &u0, &setup(0)).is_err());
        let open = Field::from_fn(g, |_| 1.0);
        assert!(build_controlled_trajectory(&open, &u0, &setup(1)).is_err());
        let other = Field::zeros(Grid::new(32).unwrap());
        assert!(build_controlled_trajectory(&u0, &other, &setup(1)).is_err());
    }
}
