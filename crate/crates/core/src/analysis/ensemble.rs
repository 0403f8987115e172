use super::{
    dichotomy_probe, harnack_probe, sup_bound_probe, BoundedCoefficient, DatumKind, RandomCoefficient, RandomDatum,
};
use crate::error::{Error, Result};
use crate::grid::{Grid, Interval};
use crate::scalar::Real;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Parameters of a random ensemble of linear problems.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub nu: f64,
    pub rho: f64,
    pub n_scenarios: usize,
    pub seed: u64,
    pub n_cells: usize,
    pub t_end: f64,
    /// Inner interval on which the mass side of the dichotomy is measured.
    pub inner: (f64, f64),
    /// Compact on which the Harnack quotient is measured.
    pub harnack_set: (f64, f64),
    /// Number of sine modes in the random coefficients.
    pub n_modes: usize,
    /// Coefficients are normalised to `fill * rho`.
    pub fill: f64,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            nu: 0.1,
            rho: 2.0,
            n_scenarios: 100,
            seed: 1,
            n_cells: 128,
            t_end: 1.0,
            inner: (0.4, 0.6),
            harnack_set: (0.25, 0.75),
            n_modes: 3,
            fill: 0.95,
        }
    }
}

impl EnsembleSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_n_cells(mut self, n_cells: usize) -> Self {
        self.n_cells = n_cells;
        self
    }

    /// `T′ = 2T/3`.
    pub fn t_prime(&self) -> f64 {
        2.0 * self.t_end / 3.0
    }

    /// Coefficient/datum pairs, reproducible from the seed and independent of the grid.
    pub fn scenarios(&self) -> Vec<ScenarioDraw> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let kinds = [DatumKind::Fourier, DatumKind::Bump, DatumKind::Dipole];
        (0..self.n_scenarios)
            .map(|i| {
                let coeff = RandomCoefficient::draw(&mut rng, self.n_modes, self.t_end, self.fill * self.rho);
                let datum = RandomDatum::draw(&mut rng, kinds[i % kinds.len()]);
                ScenarioDraw { coeff, datum }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDraw {
    pub coeff: RandomCoefficient,
    pub datum: RandomDatum,
}

/// Per-scenario measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub index: usize,
    pub kind: DatumKind,
    pub coeff_bound: f64,
    pub q_side: f64,
    pub mass_side: f64,
    /// Harnack quotient for `|w0|`.
    pub harnack: f64,
    /// Sup bound on `[2T/3, T]`.
    pub sup_bound: f64,
}

/// A `(q, ε)` pair for which every scenario satisfies one of the dichotomy inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub q: f64,
    pub eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub rho: f64,
    pub n: usize,
    pub seed: u64,
    pub q_star: f64,
    pub eps_star: f64,
    #[serde(rename = "C_emp")]
    pub c_emp: f64,
    #[serde(rename = "M_emp")]
    pub m_emp: f64,
    pub max_coeff_bound: f64,
    pub frontier: Vec<FrontierPoint>,
    pub outcomes: Vec<ScenarioOutcome>,
}

impl EnsembleReport {
    /// Per-scenario table with header `index,kind,coeff_bound,q_side,mass_side,harnack,sup_bound`.
    pub fn scenarios_csv(&self) -> String {
        let mut out = String::from("index,kind,coeff_bound,q_side,mass_side,harnack,sup_bound\n");
        for o in &self.outcomes {
            let kind = match o.kind {
                DatumKind::Fourier => "fourier",
                DatumKind::Bump => "bump",
                DatumKind::Dipole => "dipole",
            };
            out.push_str(&format!(
                "{},{kind},{:e},{:e},{:e},{:e},{:e}\n",
                o.index, o.coeff_bound, o.q_side, o.mass_side, o.harnack, o.sup_bound
            ));
        }
        out
    }
}

/// Fraction of scenarios for which neither `q_side ≤ q` nor `mass_side ≥ ε` holds.
pub fn ensemble_dichotomy(outcomes: &[ScenarioOutcome], q: f64, eps: f64) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    let failing = outcomes.iter().filter(|o| o.q_side > q && o.mass_side < eps).count();
    failing as f64 / outcomes.len() as f64
}

/// Pareto frontier of full-coverage pairs: for each observed `q_s`, the largest
/// admissible `ε` is the smallest mass side among scenarios with `q_side > q_s`.
pub fn dichotomy_frontier(outcomes: &[ScenarioOutcome]) -> Vec<FrontierPoint> {
    let mut qs: Vec<f64> = outcomes.iter().map(|o| o.q_side).collect();
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    let mut frontier: Vec<FrontierPoint> = Vec::new();
    for &q in &qs {
        let eps = outcomes
            .iter()
            .filter(|o| o.q_side > q)
            .map(|o| o.mass_side)
            .fold(f64::INFINITY, f64::min);
        if !eps.is_finite() {
            continue;
        }
        match frontier.last_mut() {
            Some(last) if eps <= last.eps => {}
            _ => frontier.push(FrontierPoint { q, eps }),
        }
    }
    frontier
}

/// Frontier point maximising `(1 − q) ε`, the area of the excluded corner.
pub fn representative_point(frontier: &[FrontierPoint]) -> Option<FrontierPoint> {
    frontier
        .iter()
        .copied()
        .filter(|p| p.q < 1.0 && p.eps > 0.0)
        .max_by(|a, b| ((1.0 - a.q) * a.eps).total_cmp(&((1.0 - b.q) * b.eps)))
}

fn evaluate<T: Real>(spec: &EnsembleSpec, index: usize, draw: &ScenarioDraw) -> Result<ScenarioOutcome> {
    let grid = Grid::<T>::new(spec.n_cells)?;
    let t_end = T::lit(spec.t_end);
    let traj = draw.coeff.sample(grid, t_end, grid.dx())?;
    let coeff = BoundedCoefficient::checked(traj, spec.rho)?;
    let nu = T::lit(spec.nu);
    let w0 = draw.datum.sample(grid);
    let inner = Interval::new(T::lit(spec.inner.0), T::lit(spec.inner.1))?;
    let k = Interval::new(T::lit(spec.harnack_set.0), T::lit(spec.harnack_set.1))?;
    let t_prime = T::lit(spec.t_prime());
    let verdict = dichotomy_probe(nu, &coeff, &w0, inner, t_end, 1.0, 0.0)?;
    let abs = w0.map(|v| v.abs());
    let harnack = harnack_probe(nu, &coeff, &abs, k, t_prime, t_end)?;
    let sup_bound = sup_bound_probe(nu, &coeff, &w0, t_prime, t_end)?;
    Ok(ScenarioOutcome {
        index,
        kind: draw.datum.kind,
        coeff_bound: coeff.bound().total,
        q_side: verdict.q_side,
        mass_side: verdict.mass_side,
        harnack: harnack.ratio,
        sup_bound: sup_bound.as_f64(),
    })
}

/// Evaluates every scenario (in parallel) and aggregates the empirical constants.
pub fn run_ensemble<T: Real>(spec: &EnsembleSpec) -> Result<EnsembleReport> {
    if spec.n_scenarios == 0 {
        return Err(Error::precondition("ensemble needs at least one scenario"));
    }
    let draws = spec.scenarios();
    let outcomes = draws
        .par_iter()
        .enumerate()
        .map(|(i, d)| evaluate::<T>(spec, i, d))
        .collect::<Result<Vec<_>>>()?;
    let frontier = dichotomy_frontier(&outcomes);
    let star = representative_point(&frontier).unwrap_or(FrontierPoint { q: 1.0, eps: 0.0 });
    let max_of = |f: fn(&ScenarioOutcome) -> f64| outcomes.iter().map(f).fold(0.0, f64::max);
    Ok(EnsembleReport {
        rho: spec.rho,
        n: outcomes.len(),
        seed: spec.seed,
        q_star: star.q,
        eps_star: star.eps,
        c_emp: max_of(|o| o.harnack),
        m_emp: max_of(|o| o.sup_bound),
        max_coeff_bound: max_of(|o| o.coeff_bound),
        frontier,
        outcomes,
    })
}
