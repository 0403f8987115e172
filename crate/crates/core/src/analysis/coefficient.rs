use crate::error::{Error, Result};
use crate::grid::{d_dx, Field, Grid, Trajectory};
use crate::scalar::Real;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Upper bound on the number of time levels used for the temporal Hölder quotient.
const HOLDER_TIME_LEVELS: usize = 128;

/// Discrete surrogate of `‖a‖_{C^{1/2}} + ‖∂ₓa‖_{L^∞}` over the sampled window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientBound {
    pub sup: f64,
    /// `max |a(t, x) − a(t, y)| / |x − y|^{1/2}` over node pairs.
    pub holder_x: f64,
    /// `max |a(t, x) − a(s, x)| / |t − s|^{1/2}` over (subsampled) time pairs.
    pub holder_t: f64,
    pub grad_sup: f64,
    pub total: f64,
}

impl CoefficientBound {
    pub fn of<T: Real>(a: &Trajectory<T>) -> Self {
        let grid = a.grid();
        let n = grid.n_nodes();
        let dx = grid.dx().as_f64();
        let frames: Vec<Vec<f64>> = a
            .frames()
            .iter()
            .map(|f| f.values().iter().map(|v| v.as_f64()).collect())
            .collect();

        let mut sup = 0.0f64;
        let mut holder_x = 0.0f64;
        let mut grad_sup = 0.0f64;
        let inv_sqrt: Vec<f64> = (0..n).map(|d| if d == 0 { 0.0 } else { 1.0 / (d as f64 * dx).sqrt() }).collect();
        for f in &frames {
            for &v in f {
                sup = sup.max(v.abs());
            }
            for &g in &d_dx(f, dx) {
                grad_sup = grad_sup.max(g.abs());
            }
            for i in 0..n {
                for j in i + 1..n {
                    holder_x = holder_x.max((f[j] - f[i]).abs() * inv_sqrt[j - i]);
                }
            }
        }

        let dt = a.dt().as_f64();
        let len = frames.len();
        let stride = len.div_ceil(HOLDER_TIME_LEVELS).max(1);
        let levels: Vec<usize> = (0..len).step_by(stride).chain(std::iter::once(len - 1)).collect();
        let mut holder_t = 0.0f64;
        let mut pair = |p: usize, q: usize| {
            let w = 1.0 / ((q - p) as f64 * dt).sqrt();
            for (x, y) in frames[p].iter().zip(&frames[q]) {
                holder_t = holder_t.max((y - x).abs() * w);
            }
        };
        for (ip, &p) in levels.iter().enumerate() {
            for &q in &levels[ip + 1..] {
                if q > p {
                    pair(p, q);
                }
            }
        }
        for p in 0..len.saturating_sub(1) {
            pair(p, p + 1);
        }

        Self {
            sup,
            holder_x,
            holder_t,
            grad_sup,
            total: sup + holder_x + holder_t + grad_sup,
        }
    }
}

/// Sampled coefficient `a(t, x)` of the linear equation together with its measured bound.
#[derive(Debug, Clone)]
pub struct BoundedCoefficient<T> {
    traj: Trajectory<T>,
    bound: CoefficientBound,
}

impl<T: Real> BoundedCoefficient<T> {
    /// Measures the bound without enforcing a cap.
    pub fn measured(traj: Trajectory<T>) -> Self {
        let bound = CoefficientBound::of(&traj);
        Self { traj, bound }
    }

    /// Measures the bound and rejects the coefficient if it exceeds `rho`.
    pub fn checked(traj: Trajectory<T>, rho: f64) -> Result<Self> {
        let c = Self::measured(traj);
        if !(c.bound.total <= rho) {
            return Err(Error::precondition(format!(
                "coefficient bound {:.4} exceeds rho = {rho}",
                c.bound.total
            )));
        }
        Ok(c)
    }

    /// `a ≡ 0` on `[0, t_end]` with frame spacing `dt`.
    pub fn zero(grid: Grid<T>, t_end: T, dt: T) -> Result<Self> {
        let n = frames_for(t_end, dt)?;
        Ok(Self::measured(Trajectory::zeros(grid, T::zero(), t_end / T::from_usize_lossy(n), n)?))
    }

    #[inline]
    pub fn trajectory(&self) -> &Trajectory<T> {
        &self.traj
    }

    #[inline]
    pub fn bound(&self) -> CoefficientBound {
        self.bound
    }

    pub fn grid(&self) -> &Grid<T> {
        self.traj.grid()
    }
}

pub(crate) fn frames_for<T: Real>(t_end: T, dt: T) -> Result<usize> {
    if !(t_end > T::zero()) || !(dt > T::zero()) {
        return Err(Error::precondition(format!("need t_end > 0 and dt > 0, got {t_end}, {dt}")));
    }
    (t_end / dt - T::lit(1e-9))
        .ceil()
        .max(T::one())
        .to_usize()
        .ok_or_else(|| Error::precondition("too many frames"))
}

/// Smooth random coefficient `a(t, x) = Σ_m (α_m + β_m sin(2π t / T + ψ_m)) φ_m(x)`
/// with `φ_0 = 1` and `φ_m = sin(mπx)`, normalised so that its bound on a
/// fixed reference lattice is `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomCoefficient {
    modes: Vec<(f64, f64, f64)>,
    period: f64,
    gain: f64,
}

/// Reference lattice on which random coefficients are normalised, so that a
/// scenario is the same function on every grid it is sampled on.
const REFERENCE_CELLS: usize = 128;
const REFERENCE_FRAMES: usize = 128;

impl RandomCoefficient {
    pub fn draw(rng: &mut ChaCha8Rng, n_modes: usize, t_end: f64, scale: f64) -> Self {
        let modes = (0..=n_modes)
            .map(|m| {
                let decay = 1.0 / (1.0 + m as f64);
                (
                    rng.gen_range(-1.0..1.0) * decay,
                    rng.gen_range(-1.0..1.0) * decay,
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let mut c = Self {
            modes,
            period: t_end,
            gain: 1.0,
        };
        let grid = Grid::<f64>::new(REFERENCE_CELLS).expect("reference grid");
        let reference = c.sample(grid, t_end, t_end / REFERENCE_FRAMES as f64).expect("reference sample");
        let b = CoefficientBound::of(&reference).total;
        c.gain = if b > 0.0 { scale / b } else { 0.0 };
        c
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let pi = std::f64::consts::PI;
        let phase = std::f64::consts::TAU * t / self.period;
        self.gain
            * self
                .modes
                .iter()
                .enumerate()
                .map(|(m, &(alpha, beta, psi))| {
                    let shape = if m == 0 { 1.0 } else { (m as f64 * pi * x).sin() };
                    (alpha + beta * (phase + psi).sin()) * shape
                })
                .sum::<f64>()
    }

    pub fn sample<T: Real>(&self, grid: Grid<T>, t_end: T, dt: T) -> Result<Trajectory<T>> {
        let n = frames_for(t_end, dt)?;
        let dt = t_end / T::from_usize_lossy(n);
        Trajectory::from_fn(grid, T::zero(), dt, n, |t, x| T::lit(self.eval(t.as_f64(), x.as_f64())))
    }
}

/// Shape of a random initial datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatumKind {
    /// Sign-changing sine series.
    Fourier,
    /// Non-negative bump.
    Bump,
    /// Difference of two bumps.
    Dipole,
}

/// Random Dirichlet initial datum given in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomDatum {
    pub kind: DatumKind,
    coeffs: Vec<f64>,
    bumps: Vec<(f64, f64, f64)>,
}

impl RandomDatum {
    pub fn draw(rng: &mut ChaCha8Rng, kind: DatumKind) -> Self {
        let mut bump = |sign: f64| {
            let centre = rng.gen_range(0.1..0.9);
            let width = rng.gen_range(0.03f64..0.2).min(centre).min(1.0 - centre);
            let height = sign * rng.gen_range(0.5..2.0);
            (centre, width, height)
        };
        let (coeffs, bumps) = match kind {
            DatumKind::Fourier => {
                let c = (1..=6).map(|m| rng.gen_range(-1.0..1.0) / m as f64).collect();
                (c, vec![])
            }
            DatumKind::Bump => (vec![], vec![bump(1.0)]),
            DatumKind::Dipole => (vec![], vec![bump(1.0), bump(-1.0)]),
        };
        Self { kind, coeffs, bumps }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pi = std::f64::consts::PI;
        let series: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * ((m + 1) as f64 * pi * x).sin())
            .sum();
        let bumps: f64 = self
            .bumps
            .iter()
            .map(|&(c, w, h)| {
                let s = (x - c) / w;
                if s.abs() < 1.0 {
                    h * (1.0 - s * s).powi(3)
                } else {
                    0.0
                }
            })
            .sum();
        series + bumps
    }

    pub fn sample<T: Real>(&self, grid: Grid<T>) -> Field<T> {
        Field::dirichlet_from_fn(grid, |x| T::lit(self.eval(x.as_f64())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn bound_of_linear_profile() {
        let g = Grid::<f64>::new(16).unwrap();
        let a = Trajectory::from_fn(g, 0.0, 0.25, 4, |_, x| x).unwrap();
        let b = CoefficientBound::of(&a);
        assert!((b.sup - 1.0).abs() < 1e-14);
        assert!((b.grad_sup - 1.0).abs() < 1e-12);
        // sup of |x − y|^{1/2} over pairs is attained at the end points.
        assert!((b.holder_x - 1.0).abs() < 1e-12);
        assert_eq!(b.holder_t, 0.0);
    }

    #[test]
    fn bound_is_homogeneous() {
        let g = Grid::<f64>::new(32).unwrap();
        let a = Trajectory::from_fn(g, 0.0, 0.1, 10, |t, x| (3.0 * x + t).sin()).unwrap();
        let b1 = CoefficientBound::of(&a).total;
        let b3 = CoefficientBound::of(&a.map_frames(|f| f.scale(3.0))).total;
        assert!((b3 - 3.0 * b1).abs() < 1e-12 * b3);
    }

    #[test]
    fn random_coefficient_meets_scale_and_is_reproducible() {
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let c1 = RandomCoefficient::draw(&mut r1, 3, 1.0, 1.9);
        let c2 = RandomCoefficient::draw(&mut r2, 3, 1.0, 1.9);
        assert_eq!(c1, c2);
        let g = Grid::<f64>::new(128).unwrap();
        let a = c1.sample(g, 1.0, 1.0 / 128.0).unwrap();
        assert!((CoefficientBound::of(&a).total - 1.9).abs() < 1e-9);
        assert!(BoundedCoefficient::checked(a, 2.0).is_ok());
    }

    #[test]
    fn checked_rejects_large_coefficients() {
        let g = Grid::<f64>::new(16).unwrap();
        let a = Trajectory::from_fn(g, 0.0, 0.25, 4, |_, _| 3.0).unwrap();
        assert!(BoundedCoefficient::checked(a, 2.0).is_err());
    }

    #[test]
    fn random_data_are_dirichlet_and_signed_as_requested() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Grid::<f64>::new(64).unwrap();
        for _ in 0..20 {
            let b = RandomDatum::draw(&mut rng, DatumKind::Bump).sample(g);
            assert!(b.is_dirichlet());
            assert!(b.min_value() >= 0.0);
            let f = RandomDatum::draw(&mut rng, DatumKind::Fourier).sample(g);
            assert!(f.is_dirichlet());
        }
    }
}
