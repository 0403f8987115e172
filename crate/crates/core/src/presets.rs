//! Named forcing terms and initial data, as used by scenario files.

use crate::grid::{Field, Grid};
use crate::scalar::Real;
use crate::solver::SpaceTimeFn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Forcing `h(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Forcing {
    #[default]
    Zero,
    /// `amp sin(kπx)`.
    Sine { k: u32, amp: f64 },
    /// `amp sin(kπx) cos(ωt)`.
    SineCosine { k: u32, amp: f64, omega: f64 },
}

impl Forcing {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match *self {
            Forcing::Zero => 0.0,
            Forcing::Sine { k, amp } => amp * (k as f64 * PI * x).sin(),
            Forcing::SineCosine { k, amp, omega } => amp * (k as f64 * PI * x).sin() * (omega * t).cos(),
        }
    }

    /// `‖h‖_{L^∞}`.
    pub fn sup(&self) -> f64 {
        match *self {
            Forcing::Zero => 0.0,
            Forcing::Sine { k, amp } | Forcing::SineCosine { k, amp, .. } => {
                if k == 0 {
                    0.0
                } else {
                    amp.abs()
                }
            }
        }
    }

    pub fn to_fn<T: Real>(&self) -> SpaceTimeFn<T> {
        if matches!(self, Forcing::Zero) {
            return SpaceTimeFn::zero();
        }
        let h = *self;
        SpaceTimeFn::new(move |t: T, x: T| T::lit(h.eval(t.as_f64(), x.as_f64())))
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Forcing::Zero => Ok(()),
            Forcing::Sine { amp, .. } if !amp.is_finite() => Err("forcing amplitude must be finite".into()),
            Forcing::SineCosine { amp, omega, .. } if !(amp.is_finite() && omega.is_finite()) => {
                Err("forcing amplitude and frequency must be finite".into())
            }
            _ => Ok(()),
        }
    }
}

/// Initial datum on `[0, 1]`, sampled with zero end values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialDatum {
    #[default]
    Zero,
    /// `amp sin(kπx)`.
    Sine { k: u32, amp: f64 },
    /// `Σ_{m ≤ n_modes} c_m sin(mπx) / m` with seeded `c_m ∈ [−1, 1]`, scaled to sup `amp` on a
    /// 1024-cell lattice.
    RandomFourier { seed: u64, n_modes: usize, amp: f64 },
    /// The constant `value` in the interior, clipped to zero at the end points.
    ConstantClip { value: f64 },
}

const REFERENCE_POINTS: usize = 1024;

fn random_fourier_coefficients(seed: u64, n_modes: usize, amp: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (1..=n_modes).map(|m| rng.gen_range(-1.0..1.0) / m as f64).collect();
    let sup = (0..=REFERENCE_POINTS)
        .map(|i| fourier_sum(&raw, i as f64 / REFERENCE_POINTS as f64).abs())
        .fold(0.0, f64::max);
    let gain = if sup > 0.0 { amp / sup } else { 0.0 };
    raw.into_iter().map(|c| c * gain).collect()
}

fn fourier_sum(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(m, c)| c * ((m + 1) as f64 * PI * x).sin())
        .sum()
}

impl InitialDatum {
    pub fn sample<T: Real>(&self, grid: Grid<T>) -> Field<T> {
        match *self {
            InitialDatum::Zero => Field::zeros(grid),
            InitialDatum::Sine { k, amp } => {
                Field::dirichlet_from_fn(grid, |x| T::lit(amp * (k as f64 * PI * x.as_f64()).sin()))
            }
            InitialDatum::RandomFourier { seed, n_modes, amp } => {
                let coeffs = random_fourier_coefficients(seed, n_modes, amp);
                Field::dirichlet_from_fn(grid, |x| T::lit(fourier_sum(&coeffs, x.as_f64())))
            }
            InitialDatum::ConstantClip { value } => Field::dirichlet_from_fn(grid, |_| T::lit(value)),
        }
    }

    /// `sup |u0|` of the continuous datum.
    pub fn sup(&self) -> f64 {
        match *self {
            InitialDatum::Zero => 0.0,
            InitialDatum::Sine { k, amp } => {
                if k == 0 {
                    0.0
                } else {
                    amp.abs()
                }
            }
            InitialDatum::RandomFourier { n_modes, amp, .. } => {
                if n_modes == 0 {
                    0.0
                } else {
                    amp.abs()
                }
            }
            InitialDatum::ConstantClip { value } => value.abs(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = match *self {
            InitialDatum::Zero => true,
            InitialDatum::Sine { amp, .. } | InitialDatum::RandomFourier { amp, .. } => amp.is_finite(),
            InitialDatum::ConstantClip { value } => value.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err("initial datum amplitude must be finite".into())
        }
    }

    /// A seeded random datum for ensembles: random Fourier with 1–6 modes.
    pub fn random(rng: &mut impl Rng, amp: f64) -> Self {
        InitialDatum::RandomFourier {
            seed: rng.gen(),
            n_modes: rng.gen_range(1..=6),
            amp,
        }
    }
}

/// Forcing of the demonstration stabilisation run, `0.5 sin(2πx)`.
pub fn demo_forcing() -> Forcing {
    Forcing::Sine { k: 2, amp: 0.5 }
}

/// `(u0, û0)` of the demonstration stabilisation run.
pub fn demo_data() -> (InitialDatum, InitialDatum) {
    (InitialDatum::Sine { k: 1, amp: 0.8 }, InitialDatum::Sine { k: 3, amp: -0.5 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forcing_sup_and_zero_fn() {
        assert_eq!(Forcing::Zero.sup(), 0.0);
        assert!(Forcing::Zero.to_fn::<f64>().is_zero());
        let h = Forcing::SineCosine { k: 2, amp: -0.5, omega: 3.0 };
        assert_eq!(h.sup(), 0.5);
        let f = h.to_fn::<f64>();
        assert!((f.eval(0.0, 0.25) + 0.5).abs() < 1e-15);
        let g = Grid::<f64>::new(64).unwrap();
        assert!(f.sup_on(&g, 0.0, 1.0, 16) <= h.sup() + 1e-12);
    }

    #[test]
    fn data_are_dirichlet_and_bounded() {
        let g = Grid::<f64>::new(128).unwrap();
        for d in [
            InitialDatum::Zero,
            InitialDatum::Sine { k: 3, amp: 2.0 },
            InitialDatum::RandomFourier { seed: 7, n_modes: 5, amp: 3.0 },
            InitialDatum::ConstantClip { value: -1.5 },
        ] {
            let f = d.sample(g);
            assert!(f.is_dirichlet());
            let sup = f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(sup <= d.sup() + 1e-12, "{d:?}");
        }
        let f = InitialDatum::RandomFourier { seed: 7, n_modes: 5, amp: 3.0 }.sample(g);
        assert!(f.values().iter().any(|v| v.abs() > 2.9));
    }

    #[test]
    fn toml_style_tags() {
        let d: InitialDatum = serde_json::from_str(r#"{"kind":"random-fourier","seed":1,"n_modes":3,"amp":1.0}"#).unwrap();
        assert_eq!(d, InitialDatum::RandomFourier { seed: 1, n_modes: 3, amp: 1.0 });
        let h: Forcing = serde_json::from_str(r#"{"kind":"sine-cosine","k":1,"amp":1.0,"omega":2.0}"#).unwrap();
        assert_eq!(h.sup(), 1.0);
        assert!(serde_json::from_str::<Forcing>(r#"{"kind":"sine","k":1}"#).is_err());
    }
}
