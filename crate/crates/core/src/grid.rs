//! Uniform mesh on the unit interval, nodal fields, trajectories and the
//! discrete norms used by every estimate in the crate.
//!
//! Integrals use the trapezoid rule on nodal values. Sobolev norms are
//! "discrete Sobolev norms": derivatives come from finite differences of
//! nodal values (centred in the interior, one-sided second order at the
//! end points), then are integrated with the same trapezoid rule.

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::Serialize;
use std::fmt::Write as _;

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 8;

/// Uniform mesh on `[0, 1]` with nodes `x_i = i * dx`, `i = 0..=n_cells`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    n_cells: usize,
    dx: T,
}

impl<T: Real> Grid<T> {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < MIN_CELLS {
            return Err(Error::precondition(format!(
                "n_cells = {n_cells} is below the minimum {MIN_CELLS}"
            )));
        }
        Ok(Self {
            n_cells,
            dx: T::one() / T::from_usize_lossy(n_cells),
        })
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.dx
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        T::from_usize_lossy(i) * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..=self.n_cells).map(move |i| self.x(i))
    }

    /// Indices of the nodes lying in `[lo, hi]`, with the end points rounded
    /// inward to the nearest node.
    pub fn inner_node_range(&self, sub: Interval<T>) -> std::ops::RangeInclusive<usize> {
        let n = T::from_usize_lossy(self.n_cells);
        let slack = T::round_off() * n;
        let lo = (sub.lo() * n - slack).ceil().max(T::zero());
        let hi = (sub.hi() * n + slack).floor().min(n);
        let lo = lo.to_usize().unwrap_or(0);
        let hi = hi.to_usize().unwrap_or(self.n_cells);
        lo..=hi
    }

    /// Same mesh with twice as many cells.
    pub fn refined(&self) -> Self {
        Self::new(self.n_cells * 2).expect("refinement keeps n_cells above minimum")
    }
}

/// Closed sub-interval of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::precondition("interval end points must be finite"));
        }
        if lo > hi {
            return Err(Error::precondition(format!("interval reversed: [{lo}, {hi}]")));
        }
        if lo < T::zero() || hi > T::one() {
            return Err(Error::precondition(format!(
                "interval [{lo}, {hi}] leaves [0, 1]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self {
            lo: T::zero(),
            hi: T::one(),
        }
    }

    #[inline]
    pub fn lo(&self) -> T {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> T {
        self.hi
    }

    #[inline]
    pub fn length(&self) -> T {
        self.hi - self.lo
    }

    #[inline]
    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Spatial profile sampled on the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            grid,
            values: vec![T::zero(); grid.n_nodes()],
        }
    }

    pub fn from_values(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::precondition(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.n_nodes()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Self {
        Self {
            grid,
            values: grid.nodes().map(f).collect(),
        }
    }

    /// Like [`Field::from_fn`] with the end values forced to zero.
    pub fn dirichlet_from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(grid, f).into_dirichlet()
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn is_dirichlet(&self) -> bool {
        self.values[0] == T::zero() && self.values[self.grid.n_cells] == T::zero()
    }

    pub fn into_dirichlet(mut self) -> Self {
        let n = self.grid.n_cells;
        self.values[0] = T::zero();
        self.values[n] = T::zero();
        self
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::zero())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn positive_part(&self) -> Self {
        self.map(|v| v.max(T::zero()))
    }

    pub fn negative_part(&self) -> Self {
        self.map(|v| (-v).max(T::zero()))
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Linear interpolation of the nodal values at `x`.
    pub fn interpolate(&self, x: T) -> T {
        interpolate_nodal(&self.values, self.grid, x)
    }

    /// CSV rows `x,value` with a one-line header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{:e},{:e}", self.grid.x(i), v);
        }
        out
    }

    /// Parses the output of [`Field::to_csv`]. The grid is inferred from the row count.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("x,value") => {}
            other => {
                return Err(Error::precondition(format!(
                    "expected header `x,value`, found {other:?}"
                )))
            }
        }
        let mut values = Vec::new();
        for (row, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (_, v) = line
                .split_once(',')
                .ok_or_else(|| Error::precondition(format!("row {row}: missing comma")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|e| Error::precondition(format!("row {row}: {e}")))?;
            values.push(T::lit(v));
        }
        if values.is_empty() {
            return Err(Error::precondition("field CSV has no rows"));
        }
        let grid = Grid::new(values.len() - 1)?;
        Self::from_values(grid, values)
    }
}

pub(crate) fn interpolate_nodal<T: Real>(values: &[T], grid: Grid<T>, x: T) -> T {
    let n = grid.n_cells();
    let s = (x / grid.dx()).max(T::zero()).min(T::from_usize_lossy(n));
    let i = s.floor().to_usize().unwrap_or(0).min(n - 1);
    let theta = s - T::from_usize_lossy(i);
    values[i] + (values[i + 1] - values[i]) * theta
}

/// Time-indexed sequence of fields with a fixed step; frame `k` sits at `t0 + k * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    grid: Grid<T>,
    t0: T,
    dt: T,
    frames: Vec<Field<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(grid: Grid<T>, t0: T, dt: T) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::precondition(format!("trajectory dt = {dt} must be positive")));
        }
        Ok(Self {
            grid,
            t0,
            dt,
            frames: Vec::new(),
        })
    }

    /// Trajectory built by sampling `f(t, x)` on `n_steps + 1` frames.
    pub fn from_fn(grid: Grid<T>, t0: T, dt: T, n_steps: usize, f: impl Fn(T, T) -> T) -> Result<Self> {
        let mut traj = Self::new(grid, t0, dt)?;
        for k in 0..=n_steps {
            let t = traj.time(k);
            traj.frames.push(Field::from_fn(grid, |x| f(t, x)));
        }
        Ok(traj)
    }

    pub fn zeros(grid: Grid<T>, t0: T, dt: T, n_steps: usize) -> Result<Self> {
        Self::from_fn(grid, t0, dt, n_steps, |_, _| T::zero())
    }

    pub fn push(&mut self, frame: Field<T>) -> Result<()> {
        if frame.grid != self.grid {
            return Err(Error::precondition("frame grid differs from trajectory grid"));
        }
        self.frames.push(frame);
        Ok(())
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn t0(&self) -> T {
        self.t0
    }

    #[inline]
    pub fn dt(&self) -> T {
        self.dt
    }

    #[inline]
    pub fn time(&self, k: usize) -> T {
        self.t0 + T::from_usize_lossy(k) * self.dt
    }

    /// Time of the last frame.
    pub fn t_end(&self) -> T {
        self.time(self.frames.len().saturating_sub(1))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    #[inline]
    pub fn frames(&self) -> &[Field<T>] {
        &self.frames
    }

    pub fn frame(&self, k: usize) -> &Field<T> {
        &self.frames[k]
    }

    pub fn first(&self) -> &Field<T> {
        &self.frames[0]
    }

    pub fn last(&self) -> &Field<T> {
        self.frames.last().expect("trajectory has at least one frame")
    }

    pub fn into_frames(self) -> Vec<Field<T>> {
        self.frames
    }

    /// Index of the frame at time `t`, if `t` lies on the frame lattice.
    pub fn index_of(&self, t: T) -> Option<usize> {
        let s = (t - self.t0) / self.dt;
        let k = s.round();
        if k < T::zero() || (s - k).abs() > T::lit(1e-6) {
            return None;
        }
        let k = k.to_usize()?;
        (k < self.frames.len()).then_some(k)
    }

    /// Nodal values at time `t`, linear in time between frames and clamped
    /// to the covered window.
    pub fn sample_into(&self, t: T, out: &mut [T]) {
        let last = self.frames.len() - 1;
        let s = ((t - self.t0) / self.dt).max(T::zero());
        let k = s.floor().to_usize().unwrap_or(0).min(last);
        if k == last {
            out.copy_from_slice(self.frames[last].values());
            return;
        }
        let theta = (s - T::from_usize_lossy(k)).min(T::one());
        let (a, b) = (self.frames[k].values(), self.frames[k + 1].values());
        for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
            *o = *x + (*y - *x) * theta;
        }
    }

    /// Whether `[t_start, t_end]` lies inside the window covered by the frames.
    pub fn covers(&self, t_start: T, t_end: T) -> bool {
        let slack = self.dt * T::lit(1e-6);
        !self.frames.is_empty() && t_start >= self.t0 - slack && t_end <= self.t_end() + slack
    }

    pub fn map_frames(&self, f: impl Fn(&Field<T>) -> Field<T>) -> Self {
        Self {
            grid: self.grid,
            t0: self.t0,
            dt: self.dt,
            frames: self.frames.iter().map(f).collect(),
        }
    }

    /// Long-format CSV `t,x,value` with a one-line header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,value\n");
        for (k, frame) in self.frames.iter().enumerate() {
            let t = self.time(k);
            for (i, v) in frame.values().iter().enumerate() {
                let _ = writeln!(out, "{:e},{:e},{:e}", t, self.grid.x(i), v);
            }
        }
        out
    }

    /// Per-frame norm summary, ready for JSON serialisation.
    pub fn norm_summary(&self) -> Vec<FrameSummary> {
        self.frames
            .iter()
            .enumerate()
            .map(|(k, f)| FrameSummary {
                t: self.time(k).as_f64(),
                norms: Norms::of(f),
            })
            .collect()
    }
}

/// One entry of the JSON trajectory summary.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FrameSummary {
    pub t: f64,
    pub norms: Norms,
}

/// All discrete norms of a field, in double precision.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub h1: f64,
    pub h2: f64,
}

impl Norms {
    pub fn of<T: Real>(f: &Field<T>) -> Self {
        Self {
            l1: norm_l1(f).as_f64(),
            l2: norm_l2(f).as_f64(),
            linf: norm_linf(f).as_f64(),
            h1: norm_h1(f).as_f64(),
            h2: norm_h2(f).as_f64(),
        }
    }
}

// ---------------------------------------------------------------------------
// Discrete calculus

/// First derivative: centred differences inside, one-sided second order at the ends.
pub fn d_dx<T: Real>(values: &[T], dx: T) -> Vec<T> {
    let n = values.len() - 1;
    let two = T::lit(2.0);
    let mut d = vec![T::zero(); n + 1];
    for i in 1..n {
        d[i] = (values[i + 1] - values[i - 1]) / (two * dx);
    }
    d[0] = (-T::lit(3.0) * values[0] + T::lit(4.0) * values[1] - values[2]) / (two * dx);
    d[n] = (T::lit(3.0) * values[n] - T::lit(4.0) * values[n - 1] + values[n - 2]) / (two * dx);
    d
}

/// Second derivative: 3-point stencil inside, one-sided second order at the ends.
pub fn d2_dx2<T: Real>(values: &[T], dx: T) -> Vec<T> {
    let n = values.len() - 1;
    let dx2 = dx * dx;
    let mut d = vec![T::zero(); n + 1];
    for i in 1..n {
        d[i] = (values[i + 1] - T::lit(2.0) * values[i] + values[i - 1]) / dx2;
    }
    let (two, four, five) = (T::lit(2.0), T::lit(4.0), T::lit(5.0));
    d[0] = (two * values[0] - five * values[1] + four * values[2] - values[3]) / dx2;
    d[n] = (two * values[n] - five * values[n - 1] + four * values[n - 2] - values[n - 3]) / dx2;
    d
}

/// Trapezoid rule on the whole mesh.
pub fn trapezoid<T: Real>(values: &[T], dx: T) -> T {
    let n = values.len() - 1;
    let interior: T = values[1..n].iter().copied().sum();
    dx * (interior + (values[0] + values[n]) / T::lit(2.0))
}

/// Trapezoid integral of `g(f)` over `sub`, interpolating `f` linearly at
/// end points that fall between nodes.
fn integrate_on<T: Real>(f: &Field<T>, sub: Interval<T>, g: impl Fn(T) -> T) -> T {
    let grid = f.grid;
    let dx = grid.dx();
    let v = &f.values;
    let half = T::lit(0.5);
    let mut acc = T::zero();
    for i in 0..grid.n_cells() {
        let (xl, xr) = (grid.x(i), grid.x(i + 1));
        if xr <= sub.lo || xl >= sub.hi {
            continue;
        }
        if xl >= sub.lo && xr <= sub.hi {
            acc += half * (g(v[i]) + g(v[i + 1])) * dx;
            continue;
        }
        let cl = xl.max(sub.lo);
        let cr = xr.min(sub.hi);
        let at = |x: T| v[i] + (v[i + 1] - v[i]) * (x - xl) / dx;
        acc += half * (g(at(cl)) + g(at(cr))) * (cr - cl);
    }
    acc
}

// ---------------------------------------------------------------------------
// Norms

pub fn norm_l1<T: Real>(f: &Field<T>) -> T {
    integrate_on(f, Interval::unit(), |v| v.abs())
}

/// L¹ norm restricted to a closed sub-interval of `[0, 1]`.
pub fn norm_l1_on<T: Real>(f: &Field<T>, sub: Interval<T>) -> T {
    integrate_on(f, sub, |v| v.abs())
}

/// L² norm restricted to a closed sub-interval of `[0, 1]`.
pub fn norm_l2_on<T: Real>(f: &Field<T>, sub: Interval<T>) -> T {
    integrate_on(f, sub, |v| v * v).sqrt()
}

pub fn norm_linf<T: Real>(f: &Field<T>) -> T {
    f.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

pub fn norm_l2<T: Real>(f: &Field<T>) -> T {
    let sq: Vec<T> = f.values.iter().map(|v| *v * *v).collect();
    trapezoid(&sq, f.grid.dx()).sqrt()
}

fn squared_l2_of<T: Real>(values: &[T], dx: T) -> T {
    let sq: Vec<T> = values.iter().map(|v| *v * *v).collect();
    trapezoid(&sq, dx)
}

fn h1_squared<T: Real>(f: &Field<T>) -> T {
    let dx = f.grid.dx();
    squared_l2_of(&f.values, dx) + squared_l2_of(&d_dx(&f.values, dx), dx)
}

pub fn norm_h1<T: Real>(f: &Field<T>) -> T {
    h1_squared(f).sqrt()
}

pub fn norm_h2<T: Real>(f: &Field<T>) -> T {
    let dx = f.grid.dx();
    (h1_squared(f) + squared_l2_of(&d2_dx2(&f.values, dx), dx)).sqrt()
}

/// `‖f‖_{H¹} / (‖f‖_{L¹}^{2/5} ‖f‖_{H²}^{3/5})`, the quantity bounded by the
/// Gagliardo–Nirenberg type inequality relating the three norms.
pub fn interpolation_ratio<T: Real>(f: &Field<T>) -> Result<T> {
    let l1 = norm_l1(f);
    if l1 == T::zero() {
        return Err(Error::Domain("interpolation ratio of the zero field".into()));
    }
    let h1 = norm_h1(f);
    let h2 = norm_h2(f);
    Ok(h1 / (l1.powf(T::lit(0.4)) * h2.powf(T::lit(0.6))))
}

/// L² inner product by the trapezoid rule.
pub fn inner_product<T: Real>(f: &Field<T>, g: &Field<T>) -> T {
    let prod: Vec<T> = f.values.iter().zip(&g.values).map(|(a, b)| *a * *b).collect();
    trapezoid(&prod, f.grid.dx())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn sine(n: usize) -> Field<f64> {
        Field::dirichlet_from_fn(Grid::new(n).unwrap(), |x| (PI * x).sin())
    }

    #[test]
    fn grid_spacing_and_minimum() {
        let g = Grid::<f64>::new(256).unwrap();
        assert!((g.dx() * 256.0 - 1.0).abs() < 1e-14);
        assert_eq!(g.n_nodes(), 257);
        assert!(Grid::<f64>::new(7).is_err());
    }

    #[test]
    fn l1_trivial_values() {
        let g = Grid::<f64>::new(64).unwrap();
        let one = Field::from_fn(g, |_| 1.0);
        assert_relative_eq!(norm_l1(&one), 1.0, epsilon = 1e-13);
        assert_eq!(norm_l1(&Field::zeros(g)), 0.0);
        let half = Interval::new(0.25, 0.75).unwrap();
        assert_relative_eq!(norm_l1_on(&one, half), 0.5, epsilon = 1e-13);
        assert_eq!(norm_l1_on(&Field::zeros(g), half), 0.0);
    }

    #[test]
    fn l1_of_sine_matches_integral() {
        let f = sine(256);
        assert!((norm_l1(&f) - 2.0 / PI).abs() < 1e-4);
        let left = Interval::new(0.0, 0.5).unwrap();
        assert!((norm_l1_on(&f, left) - 1.0 / PI).abs() < 1e-4);
    }

    #[test]
    fn l1_on_interpolates_between_nodes() {
        let g = Grid::<f64>::new(8).unwrap();
        let f = Field::from_fn(g, |x| x);
        // ∫_{0.05}^{0.3} x dx, exact for a linear integrand
        let sub = Interval::new(0.05, 0.3).unwrap();
        assert_relative_eq!(norm_l1_on(&f, sub), (0.09 - 0.0025) / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn l1_on_full_interval_is_l1() {
        let f = sine(100);
        assert_eq!(norm_l1_on(&f, Interval::unit()), norm_l1(&f));
    }

    #[test]
    fn invalid_intervals_rejected() {
        assert!(Interval::new(0.7, 0.3).is_err());
        assert!(Interval::new(-0.1, 0.3).is_err());
        assert!(Interval::new(0.1, 1.2).is_err());
    }

    #[test]
    fn sobolev_norms_of_sine() {
        let f = sine(512);
        let pi2 = PI * PI;
        assert!((norm_l2(&f) - 0.5f64.sqrt()).abs() < 1e-4);
        assert!((norm_h1(&f) - (0.5 + pi2 / 2.0).sqrt()).abs() < 1e-3);
        assert!((norm_h2(&f) - (0.5 + pi2 / 2.0 + pi2 * pi2 / 2.0).sqrt()).abs() < 1e-2);
    }

    #[test]
    fn zero_field_norms() {
        let z = Field::<f64>::zeros(Grid::new(32).unwrap());
        assert_eq!(Norms::of(&z), Norms { l1: 0.0, l2: 0.0, linf: 0.0, h1: 0.0, h2: 0.0 });
        assert!(matches!(interpolation_ratio(&z), Err(Error::Domain(_))));
    }

    #[test]
    fn parabola_peak_on_node() {
        let f = Field::from_fn(Grid::<f64>::new(256).unwrap(), |x| x * (1.0 - x));
        assert_eq!(norm_linf(&f), 0.25);
    }

    #[test]
    fn interpolation_ratio_of_sine() {
        let f = sine(256);
        let r = interpolation_ratio(&f).unwrap();
        // analytic norms: L¹ = 2/π, H¹ = √(1/2 + π²/2), H² = √(1/2 + π²/2 + π⁴/2)
        let pi2 = PI * PI;
        let exact = (0.5 + pi2 / 2.0).sqrt()
            / ((2.0 / PI).powf(0.4) * (0.5 + pi2 / 2.0 + pi2 * pi2 / 2.0).sqrt().powf(0.6));
        assert!(r > 0.0 && r < 10.0);
        assert_relative_eq!(r, exact, max_relative = 1e-3);
        let scaled = f.scale(7.5);
        assert_relative_eq!(interpolation_ratio(&scaled).unwrap(), r, max_relative = 1e-10);
    }

    #[test]
    fn derivative_stencils_exact_on_cubics() {
        let g = Grid::<f64>::new(16).unwrap();
        let f = Field::from_fn(g, |x| x * x);
        for d in d_dx(f.values(), g.dx()).iter().zip(g.nodes()) {
            assert_relative_eq!(*d.0, 2.0 * d.1, epsilon = 1e-12);
        }
        let c = Field::from_fn(g, |x| x * x * x);
        for d in d2_dx2(c.values(), g.dx()).iter().zip(g.nodes()) {
            assert_relative_eq!(*d.0, 6.0 * d.1, epsilon = 1e-10);
        }
    }

    #[test]
    fn inner_node_range_rounds_inward() {
        let g = Grid::<f64>::new(10).unwrap();
        let r = g.inner_node_range(Interval::new(0.25, 0.75).unwrap());
        assert_eq!(r, 3..=7);
        let r = g.inner_node_range(Interval::new(0.2, 0.8).unwrap());
        assert_eq!(r, 2..=8);
    }

    #[test]
    fn trajectory_sampling_is_linear_in_time() {
        let g = Grid::<f64>::new(8).unwrap();
        let traj = Trajectory::from_fn(g, 1.0, 0.5, 4, |t, x| t + x).unwrap();
        let mut buf = vec![0.0; 9];
        traj.sample_into(1.25, &mut buf);
        assert_relative_eq!(buf[4], 1.25 + 0.5, epsilon = 1e-14);
        assert_eq!(traj.index_of(2.0), Some(2));
        assert_eq!(traj.index_of(2.1), None);
        assert!(traj.covers(1.0, 3.0));
        assert!(!traj.covers(0.5, 3.0));
    }

    #[test]
    fn csv_headers() {
        let g = Grid::<f64>::new(8).unwrap();
        let f = Field::from_fn(g, |x| x);
        assert!(f.to_csv().starts_with("x,value\n"));
        assert_eq!(f.to_csv().lines().count(), 10);
        let traj = Trajectory::zeros(g, 0.0, 0.1, 2).unwrap();
        assert!(traj.to_csv().starts_with("t,x,value\n"));
        assert_eq!(traj.to_csv().lines().count(), 1 + 3 * 9);
        assert!(Field::<f64>::from_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn single_precision_norms() {
        let f = Field::<f32>::dirichlet_from_fn(Grid::new(128).unwrap(), |x| (std::f32::consts::PI * x).sin());
        assert!((norm_l1(&f) - 2.0 / std::f32::consts::PI).abs() < 1e-3);
    }
}
