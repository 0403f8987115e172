use super::{comparison_check, left_limit_bound, Barrier, Profile};
use crate::error::{Error, Result};
use crate::grid::{norm_l2_on, Field, Grid, Interval, Trajectory};
use crate::scalar::Real;
use crate::solver::{solve_burgers, BurgersProblem, SpaceTimeFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlShape {
    /// Fixed bump.
    Steady,
    /// Fixed bump modulated by `sin(2π f t + φ)`.
    Pulsing,
    /// Narrow bump sweeping back and forth across the support.
    Sweeping,
}

/// Closed-form control supported in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdversarialControl {
    pub shape: ControlShape,
    pub amplitude: f64,
    pub lo: f64,
    pub hi: f64,
    pub frequency: f64,
    pub phase: f64,
}

fn bump(x: f64, centre: f64, half_width: f64) -> f64 {
    let s = (x - centre) / half_width;
    if s.abs() < 1.0 {
        (1.0 - s * s).powi(3)
    } else {
        0.0
    }
}

impl AdversarialControl {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            return 0.0;
        }
        let width = self.hi - self.lo;
        let mid = 0.5 * (self.lo + self.hi);
        match self.shape {
            ControlShape::Steady => self.amplitude * bump(x, mid, 0.5 * width),
            ControlShape::Pulsing => {
                self.amplitude * bump(x, mid, 0.5 * width) * (TAU * self.frequency * t + self.phase).sin()
            }
            ControlShape::Sweeping => {
                let hw = width / 8.0;
                let centre = mid + (0.5 * width - hw) * (TAU * self.frequency * t + self.phase).sin();
                self.amplitude * bump(x, centre, hw)
            }
        }
    }

    pub fn as_fn<T: Real>(&self) -> SpaceTimeFn<T> {
        let c = *self;
        SpaceTimeFn::new(move |t: T, x: T| T::lit(c.eval(t.as_f64(), x.as_f64())))
    }
}

/// `n` seeded controls on `[lo, hi]`. The first two have amplitude `±max_amp`;
/// the others have log-uniform amplitude in `[1, max_amp]` and random sign.
pub fn random_controls(n: usize, lo: f64, hi: f64, max_amp: f64, seed: u64) -> Vec<AdversarialControl> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = [ControlShape::Steady, ControlShape::Pulsing, ControlShape::Sweeping];
    (0..n)
        .map(|i| {
            let amplitude = match i {
                0 => max_amp,
                1 => -max_amp,
                _ => {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    sign * max_amp.max(1.0).powf(rng.gen_range(0.0..1.0))
                }
            };
            AdversarialControl {
                shape: shapes[i % shapes.len()],
                amplitude,
                lo,
                hi,
                frequency: rng.gen_range(0.5..4.0),
                phase: rng.gen_range(0.0..TAU),
            }
        })
        .collect()
}

/// Inputs of the non-controllability experiment.
#[derive(Debug, Clone, Serialize)]
pub struct NonControlSpec {
    #[serde(rename = "T0")]
    pub t_end: f64,
    pub delta: f64,
    pub a: f64,
    pub nu: f64,
    /// Bound on `‖h‖_{L^∞}`.
    pub h_inf: f64,
    #[serde(skip)]
    pub forcing: SpaceTimeFn<f64>,
    pub n_cells: usize,
    /// Amplitudes of the initial data `A sin(πx)`, `−A sin(πx)`, `A sin(2πx)`.
    pub amplitudes: Vec<f64>,
    pub controls: Vec<AdversarialControl>,
    pub target_r: f64,
    /// `ε` of the left barrier used for the comparison check.
    pub barrier_eps: f64,
    pub seed: u64,
}

impl Default for NonControlSpec {
    fn default() -> Self {
        let seed = 1;
        Self {
            t_end: 1.0,
            delta: 0.25,
            a: 0.5,
            nu: 0.1,
            h_inf: 0.0,
            forcing: SpaceTimeFn::zero(),
            n_cells: 256,
            amplitudes: vec![1.0, 10.0, 100.0, 1000.0],
            controls: random_controls(10, 0.5, 0.8, 1000.0, seed),
            target_r: 10.0,
            barrier_eps: 0.01,
            seed,
        }
    }
}

/// One Burgers run of the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonControlRun {
    pub control: usize,
    pub amplitude: f64,
    pub datum: usize,
    /// `‖u(T)‖_{L^∞(0, δ)}`.
    pub sup_left: f64,
    /// `‖u(T) − target‖_{L²(0, δ)}` for the target level `ρ + δ^{−1/2} R + 1`.
    pub target_distance: f64,
    /// Same distance for the level `ρ + δ^{1/2} R + 1`.
    pub literal_target_distance: f64,
    /// `max (u − u_ε)₊` over `[0, T] × [0, a]`.
    pub barrier_violation: f64,
    /// `max u(T)` on `[0, δ]`, the side controlled by the barrier.
    pub max_left: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonControlReport {
    #[serde(rename = "T0")]
    pub t_end: f64,
    pub delta: f64,
    pub a: f64,
    pub nu: f64,
    pub rho_emp: f64,
    pub rho_formula: f64,
    /// `max u(T)` on `[0, δ]` over all runs; `rho_emp` also counts negative values.
    pub max_left_emp: f64,
    pub n_runs: usize,
    pub seed: u64,
    pub target_level: f64,
    pub min_target_distance: f64,
    pub literal_target_level: f64,
    pub min_literal_target_distance: f64,
    pub max_barrier_violation: f64,
    pub runs: Vec<NonControlRun>,
}

impl NonControlReport {
    pub fn bound_holds(&self, tol: f64) -> bool {
        self.rho_emp <= self.rho_formula + tol
    }
}

fn datum(grid: Grid<f64>, amplitude: f64, which: usize) -> Field<f64> {
    Field::dirichlet_from_fn(grid, |x| match which {
        0 => amplitude * (PI * x).sin(),
        1 => -amplitude * (PI * x).sin(),
        _ => amplitude * (TAU * x).sin(),
    })
}

/// Verifies that every control vanishes on `(0, a)` on a space-time lattice.
fn check_support(spec: &NonControlSpec, grid: &Grid<f64>) -> Result<()> {
    for (idx, c) in spec.controls.iter().enumerate() {
        if c.lo < spec.a {
            return Err(Error::precondition(format!(
                "control {idx} is supported in [{}, {}], which meets (0, a = {})",
                c.lo, c.hi, spec.a
            )));
        }
        for k in 0..=64 {
            let t = spec.t_end * k as f64 / 64.0;
            for x in grid.nodes().filter(|&x| x < spec.a) {
                if c.eval(t, x) != 0.0 {
                    return Err(Error::precondition(format!("control {idx} is non-zero at (t, x) = ({t}, {x})")));
                }
            }
        }
    }
    Ok(())
}

fn one_run(spec: &NonControlSpec, grid: Grid<f64>, ci: usize, amplitude: f64, which: usize) -> Result<NonControlRun> {
    let control = &spec.controls[ci];
    let u0 = datum(grid, amplitude, which);
    let problem = BurgersProblem::new(spec.nu, u0.clone(), 0.0, spec.t_end)
        .with_forcing(spec.forcing.clone())
        .with_control(control.as_fn());
    let u = solve_burgers(&problem)?;
    let left = Interval::new(0.0, spec.delta)?;
    let end = u.last();
    let left_values = || grid.inner_node_range(left).map(|i| end.values()[i]);
    let sup_left = left_values().map(f64::abs).fold(0.0, f64::max);
    let max_left = left_values().fold(f64::NEG_INFINITY, f64::max);

    let rho = left_limit_bound(spec.nu, spec.t_end, spec.a, spec.delta, spec.h_inf);
    let distance = |level: f64| norm_l2_on(&end.map(|v| v - level), left);
    let target_distance = distance(rho + spec.target_r / spec.delta.sqrt() + 1.0);
    let literal_target_distance = distance(rho + spec.target_r * spec.delta.sqrt() + 1.0);

    let domain = Interval::new(0.0, spec.a)?;
    let nodes = grid.inner_node_range(domain);
    let l = nodes.clone().map(|i| u0.values()[i].abs()).fold(0.0, f64::max);
    let ia = *nodes.end();
    let n = u.frames().iter().map(|f| f.values()[ia].abs()).fold(0.0, f64::max);
    let barrier = Barrier::left_super(spec.barrier_eps, grid.x(ia), spec.nu, spec.t_end, l, n, spec.h_inf)?;
    // The barrier blows up right of a; nodes there are padded with its value at a.
    let mut upper = Trajectory::new(grid, u.t0(), u.dt())?;
    for k in 0..u.len() {
        let t = u.time(k);
        let mut vals = (0..=ia).map(|i| barrier.eval(t, grid.x(i))).collect::<Result<Vec<_>>>()?;
        vals.resize(grid.n_nodes(), vals[ia]);
        upper.push(Field::from_values(grid, vals)?)?;
    }
    let scale = upper.frames().iter().map(|f| f.values()[..=ia].iter().fold(0.0f64, |m, v| m.max(v.abs()))).fold(0.0, f64::max);
    let tol = 1e-3 * (1.0 + scale);
    let above = comparison_check(&upper, &u, domain, tol)?;

    Ok(NonControlRun {
        control: ci,
        amplitude,
        datum: which,
        sup_left,
        target_distance,
        literal_target_distance,
        barrier_violation: above.max_violation,
        max_left,
    })
}

/// Runs every (control, initial datum) pair and compares `‖u(T)‖_{L^∞(0, δ)}`
/// with the explicit bound `Λ / (T (a − δ))`.
pub fn non_controllability_experiment(spec: &NonControlSpec) -> Result<NonControlReport> {
    if !(spec.delta > 0.0 && spec.delta < spec.a && spec.a < 1.0) {
        return Err(Error::precondition(format!(
            "need 0 < delta < a < 1, got delta = {}, a = {}",
            spec.delta, spec.a
        )));
    }
    if !(spec.t_end > 0.0 && spec.nu > 0.0 && spec.h_inf >= 0.0) {
        return Err(Error::precondition("need T > 0, nu > 0 and ‖h‖ ≥ 0"));
    }
    let grid = Grid::<f64>::new(spec.n_cells)?;
    check_support(spec, &grid)?;
    let jobs: Vec<(usize, f64, usize)> = (0..spec.controls.len())
        .flat_map(|c| spec.amplitudes.iter().flat_map(move |&a| (0..3).map(move |d| (c, a, d))))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(c, a, d)| one_run(spec, grid, c, a, d))
        .collect::<Result<Vec<_>>>()?;
    let rho_formula = left_limit_bound(spec.nu, spec.t_end, spec.a, spec.delta, spec.h_inf);
    let fold = |f: fn(&NonControlRun) -> f64, init: f64, op: fn(f64, f64) -> f64| runs.iter().map(f).fold(init, op);
    Ok(NonControlReport {
        t_end: spec.t_end,
        delta: spec.delta,
        a: spec.a,
        nu: spec.nu,
        rho_emp: fold(|r| r.sup_left, 0.0, f64::max),
        rho_formula,
        max_left_emp: fold(|r| r.max_left, f64::NEG_INFINITY, f64::max),
        n_runs: runs.len(),
        seed: spec.seed,
        target_level: rho_formula + spec.target_r / spec.delta.sqrt() + 1.0,
        min_target_distance: fold(|r| r.target_distance, f64::INFINITY, f64::min),
        literal_target_level: rho_formula + spec.target_r * spec.delta.sqrt() + 1.0,
        min_literal_target_distance: fold(|r| r.literal_target_distance, f64::INFINITY, f64::min),
        max_barrier_violation: fold(|r| r.barrier_violation, 0.0, f64::max),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn controls_vanish_left_of_support() {
        for c in random_controls(12, 0.5, 0.8, 1000.0, 3) {
            for k in 0..20 {
                let t = k as f64 / 19.0;
                assert_eq!(c.eval(t, 0.49), 0.0);
                assert_eq!(c.eval(t, 0.5), 0.0);
                assert_eq!(c.eval(t, 0.81), 0.0);
            }
        }
        let cs = random_controls(3, 0.5, 0.8, 1000.0, 3);
        assert_eq!(cs[0].amplitude, 1000.0);
        assert_eq!(cs[1].amplitude, -1000.0);
        assert!(cs[2].amplitude.abs() >= 1.0 && cs[2].amplitude.abs() <= 1000.0);
    }

    #[test]
    fn zero_everything_contributes_zero() {
        let spec = NonControlSpec {
            n_cells: 32,
            amplitudes: vec![0.0],
            controls: vec![AdversarialControl {
                shape: ControlShape::Steady,
                amplitude: 0.0,
                lo: 0.5,
                hi: 0.8,
                frequency: 1.0,
                phase: 0.0,
            }],
            ..Default::default()
        };
        let r = non_controllability_experiment(&spec).unwrap();
        assert_eq!(r.rho_emp, 0.0);
        assert_eq!(r.n_runs, 3);
        assert!((r.rho_formula - 21.2).abs() < 1e-12);
        assert!(r.min_target_distance >= 10.0);
    }

    #[test]
    fn support_violation_rejected() {
        let mut spec = NonControlSpec {
            n_cells: 32,
            amplitudes: vec![1.0],
            ..Default::default()
        };
        spec.controls.truncate(1);
        spec.controls[0].lo = 0.3;
        assert!(matches!(non_controllability_experiment(&spec), Err(Error::Precondition(_))));
        spec.controls[0].lo = 0.5;
        spec.delta = 0.6;
        assert!(non_controllability_experiment(&spec).is_err());
    }
}
