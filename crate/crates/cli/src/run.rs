use crate::config::{ExperimentKind, ScenarioConfig};
use crate::report::{Relation, RunReport, Verdict};
use burgers_control::analysis::{
    ensemble_dichotomy, harnack_probe, run_ensemble, BoundedCoefficient, DatumKind, EnsembleReport, EnsembleSpec,
    RandomCoefficient, RandomDatum,
};
use burgers_control::barriers::{
    check_subsolution, check_supersolution, comparison_check, global_limit_bound, non_controllability_experiment,
    random_controls, Barrier, NonControlSpec, Profile,
};
use burgers_control::control::{build_controlled_trajectory, fit_decay, ControlSetup, CutoffSystem};
use burgers_control::grid::{norm_linf, Field, Grid, Interval};
use burgers_control::presets::InitialDatum;
use burgers_control::solver::{
    l1_difference_increase, l1_increase, max_principle_excess, solve_burgers, solve_linear, BurgersProblem,
    LinearProblem,
};
use burgers_control::{Error, Trajectory64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

/// A finished experiment: the report plus named CSV artifacts.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub artifacts: Vec<(String, String)>,
}

type Constants = BTreeMap<String, f64>;

fn constants<const N: usize>(pairs: [(&str, f64); N]) -> Constants {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Runs the experiment named in `config`.
pub fn run_experiment(config: &ScenarioConfig) -> Result<RunOutput, Error> {
    let start = Instant::now();
    let mut out = match config.experiment {
        ExperimentKind::Simulate => simulate(config),
        ExperimentKind::Stabilize => stabilize(config),
        ExperimentKind::Dichotomy => dichotomy(config),
        ExperimentKind::Harnack => harnack(config),
        ExperimentKind::Barrier => barrier(config),
        ExperimentKind::NonControllability => noncontrol(config),
        ExperimentKind::Contraction => contraction(config),
    }?;
    out.report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(out)
}

fn grid(config: &ScenarioConfig) -> Result<Grid<f64>, Error> {
    Grid::new(config.n_cells)
}

fn interval([lo, hi]: [f64; 2]) -> Result<Interval<f64>, Error> {
    Interval::new(lo, hi)
}

fn solve(config: &ScenarioConfig, g: Grid<f64>, u0: &InitialDatum) -> Result<Trajectory64, Error> {
    solve_burgers(
        &BurgersProblem::new(config.nu, u0.sample(g), 0.0, config.t_end)
            .with_forcing(config.forcing.to_fn())
            .with_dt(config.dt()),
    )
}

fn with_fields(config: &ScenarioConfig, mut artifacts: Vec<(String, String)>, u: &Trajectory64) -> Vec<(String, String)> {
    if config.output.fields {
        artifacts.push(("fields.csv".into(), u.to_csv()));
    }
    artifacts
}

fn simulate(config: &ScenarioConfig) -> Result<RunOutput, Error> {
    let g = grid(config)?;
    let u = solve(config, g, &config.u0)?;
    let h_sup = config.forcing.sup();
    let excess = max_principle_excess(&u, h_sup);
    let slack = config.tolerances.max_principle * (1.0 + norm_linf(u.first()) + h_sup);
    let summary = u.norm_summary();
    let last = summary.last().expect("trajectory has frames").norms;
    let report = RunReport::new(
        config.clone(),
        vec![Verdict::new("max_principle_excess", excess, Relation::Le, slack)],
        constants([
            ("l1_final", last.l1),
            ("l2_final", last.l2),
            ("linf_final", last.linf),
            ("h1_final", last.h1),
            ("max_principle_excess", excess),
        ]),
        json!({ "norms": summary }),
    );
    Ok(RunOutput {
        report,
        artifacts: with_fields(config, Vec::new(), &u),
    })
}

fn stabilize(config: &ScenarioConfig) -> Result<RunOutput, Error> {
    let g = grid(config)?;
    let cutoffs = CutoffSystem::new(interval(config.control_support)?, interval(config.inner())?)?;
    let setup = ControlSetup::new(config.nu, cutoffs, config.n_cycles)
        .with_forcing(config.forcing.to_fn())
        .with_dt(config.dt());
    let run = build_controlled_trajectory(&config.u0.sample(g), &config.u_hat0.sample(g), &setup)?;
    let errors = run.errors_at_integers();
    let decay = fit_decay(&errors)?;
    let excess = run.inter_cycle_excess();
    let support = run.zeta_support_violation();
    let mut verdicts = if decay.zero_error {
        vec![Verdict::flag("stabilised", true)]
    } else {
        vec![
            Verdict::new("theta", decay.theta, Relation::Lt, config.tolerances.theta_max),
            Verdict::new("gamma", decay.gamma, Relation::Gt, 0.0),
        ]
    };
    verdicts.push(Verdict::new("zeta_support_violation", support, Relation::Le, 0.0));
    verdicts.push(Verdict::new(
        "inter_cycle_excess",
        excess,
        Relation::Le,
        config.tolerances.max_principle * (1.0 + errors[0]),
    ));
    let report = RunReport::new(
        config.clone(),
        verdicts,
        constants([
            ("theta", decay.theta),
            ("gamma", decay.gamma),
            ("C", decay.c),
            ("zeta_lipschitz", run.zeta_lipschitz()),
            ("max_h2", run.max_h2()),
        ]),
        json!({ "decay": decay, "errors_at_integers": errors, "cycles": run.cycles }),
    );
    let artifacts = vec![("cycles.csv".to_string(), run.cycles_csv())];
    Ok(RunOutput {
        report,
        artifacts: with_fields(config, artifacts, &run.u),
    })
}

fn ensemble_spec(config: &ScenarioConfig) -> EnsembleSpec {
    let e = &config.ensemble;
    let [ilo, ihi] = config.inner();
    EnsembleSpec {
        nu: config.nu,
        rho: e.rho,
        n_scenarios: e.n_scenarios,
        seed: config.seed,
        n_cells: config.n_cells,
        t_end: config.t_end,
        inner: (ilo, ihi),
        harnack_set: (e.harnack_set[0], e.harnack_set[1]),
        n_modes: e.n_modes,
        fill: e.fill,
    }
}

fn ensemble_constants(r: &EnsembleReport) -> Constants {
    constants([
        ("q_star", r.q_star),
        ("eps_star", r.eps_star),
        ("C_emp", r.c_emp),
        ("M_emp", r.m_emp),
        ("max_coeff_bound", r.max_coeff_bound),
    ])
}

fn ensemble_details(r: &EnsembleReport) -> serde_json::Value {
    json!({ "frontier": r.frontier, "n_scenarios": r.n, "rho": r.rho, "seed": r.seed })
}

fn dichotomy(config: &ScenarioConfig) -> Result<RunOutput, Error> {
    let r = run_ensemble::<f64>(&ensemble_spec(config))?;
    let coverage = 1.0 - ensemble_dichotomy(&r.outcomes, r.q_star, r.eps_star);
    let mut verdicts = vec![
        Verdict::new("q_star", r.q_star, Relation::Lt, 1.0),
        Verdict::new("eps_star", r.eps_star, Relation::Gt, 0.0),
        Verdict::new("coverage", coverage, Relation::Eq, 1.0),
    ];
    let mut consts = ensemble_constants(&r);
    if let (Some(q), Some(eps)) = (config.ensemble.q, config.ensemble.eps) {
        let given = 1.0 - ensemble_dichotomy(&r.outcomes, q, eps);
        verdicts.push(Verdict::new("coverage_at_given", given, Relation::Eq, 1.0));
        consts.insert("coverage_at_given".into(), given);
    }
    let report = RunReport::new(config.clone(), verdicts, consts, ensemble_details(&r));
    Ok(RunOutput {
        report,
        artifacts: vec![("scenarios.csv".into(), r.scenarios_csv())],
    })
}

/// Exact Harnack quotient of `e^{−π²t} sin πx` on the grid nodes of `k`.
fn heat_quotient(g: &Grid<f64>, k: Interval<f64>, t_prime: f64, t_end: f64) -> f64 {
    let s: Vec<f64> = g.inner_node_range(k).map(|i| (PI * g.x(i)).sin()).collect();
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    (PI * PI * (t_end - t_prime)).exp() * max / min
}

fn harnack(config: &ScenarioConfig) -> Result<RunOutput, Error> {
    let spec = ensemble_spec(config);
    let r = run_ensemble::<f64>(&spec)?;
    let g = grid(config)?;
    let heat = BoundedCoefficient::zero(g, config.t_end, g.dx())?;
    let w0 = Field::dirichlet_from_fn(g, |x| (PI * x).sin());
    let k = interval(config.ensemble.harnack_set)?;
    let t_prime = spec.t_prime();
    let est = harnack_probe(1.0, &heat, &w0, k, t_prime, config.t_end)?;
    let exact = heat_quotient(&g, k, t_prime, config.t_end);
    let rel = (est.ratio - exact).abs() / exact;
    let mut consts = ensemble_constants(&r);
    consts.insert("heat_ratio".into(), est.ratio);
    consts.insert("heat_ratio_exact".into(), exact);
    let report = RunReport::new(
        config.clone(),
        vec![
            Verdict::new("heat_ratio_rel_error", rel, Relation::Le, 0.01),
            Verdict::new("C_emp", r.c_emp, Relation::Lt, f64::INFINITY),
        ],
        consts,
        json!({ "heat": est, "ensemble": ensemble_details(&r) }),
    );
    Ok(RunOutput {
        report,
        artifacts: vec![("scenarios.csv".into(), r.scenarios_csv())],
    })
}

fn barrier(config: &ScenarioConfig) -> Result<RunOutput, Error> {
    let g = grid(config)?;
    let u = solve(config, g, &config.u0)?;
    let (h, h_sup) = (config.forcing.to_fn(), config.forcing.sup());
    let l = norm_linf(u.first());
    let tol = &config.tolerances;
    let mut verdicts = Vec::new();
    let mut consts = Constants::new();
    let mut rows = Vec::new();
    for &eps in &config.barrier.eps {
        let upper = Barrier::global_super(eps, l, h_sup, config.t_end)?;
        let lower = Barrier::global_sub(eps, l, h_sup, config.t_end)?;
        let sup_res = check_supersolution(&upper, config.nu, &h, &g, u.dt(), Interval::unit(), 0.0, config.t_end)?;
        let sub_res = check_subsolution(&lower, config.nu, &h, &g, u.dt(), Interval::unit(), 0.0, config.t_end)?;
        let n_steps = u.len() - 1;
        let up = upper.sample(g, 0.0, u.dt(), n_steps)?;
        let lo = lower.sample(g, 0.0, u.dt(), n_steps)?;
        let slack = tol.barrier * (1.0 + norm_linf(up.first()));
        let above = comparison_check(&up, &u, Interval::unit(), slack)?;
        let below = comparison_check(&u, &lo, Interval::unit(), slack)?;
        let violation = above.max_violation.max(below.max_violation);
        let tag = format!("eps={eps}");
        verdicts.push(Verdict::new(format!("super_residual_min[{tag}]"), sup_res, Relation::Ge, -tol.max_principle));
        verdicts.push(Verdict::new(format!("sub_residual_max[{tag}]"), sub_res, Relation::Le, tol.max_principle));
        verdicts.push(Verdict::new(format!("sandwich_violation[{tag}]"), violation, Relation::Le, slack));
        consts.insert(format!("barrier_at_T[{tag}]"), norm_linf(up.last()));
        rows.push(json!({
            "eps": eps,
            "coefficient": upper.coeff,
            "super_residual_min": sup_res,
            "sub_residual_max": sub_res,
            "upper": above,
            "lower": below,
        }));
    }
    let limit = global_limit_bound(h_sup, config.t_end);
    let final_sup = norm_linf(u.last());
    verdicts.push(Verdict::new("final_sup", final_sup, Relation::Le, limit + tol.barrier * (1.0 + limit)));
    consts.insert("limit_bound".into(), limit);
    consts.insert("final_sup".into(), final_sup);
    consts.insert("initial_sup".into(), l);
    let report = RunReport::new(config.clone(), verdicts, consts, json!({ "barriers": rows }));
    Ok(RunOutput {
        report,
        artifacts: with_fields(config, Vec::new(), &u),
    })
}

fn noncontrol(config: &ScenarioConfig) -> Result<RunOutput, Error> {
    let n = &config.noncontrol;
    let spec = NonControlSpec {
        t_end: config.t_end,
        delta: n.delta,
        a: n.a,
        nu: config.nu,
        h_inf: config.forcing.sup(),
        forcing: config.forcing.to_fn(),
        n_cells: config.n_cells,
        amplitudes: n.amplitudes.clone(),
        controls: random_controls(n.n_controls, n.controls_in[0], n.controls_in[1], n.max_control, config.seed),
        target_r: n.target_r,
        barrier_eps: n.barrier_eps,
        seed: config.seed,
    };
    let r = non_controllability_experiment(&spec)?;
    let mut csv = String::from("control,amplitude,datum,sup_left,target_distance,literal_target_distance,barrier_violation,max_left\n");
    for run in &r.runs {
        csv.push_str(&format!(
            "{},{:e},{},{:e},{:e},{:e},{:e},{:e}\n",
            run.control,
            run.amplitude,
            run.datum,
            run.sup_left,
            run.target_distance,
            run.literal_target_distance,
            run.barrier_violation,
            run.max_left
        ));
    }
    let mut details = serde_json::to_value(&r).expect("report serialises");
    if let Some(map) = details.as_object_mut() {
        map.remove("runs");
    }
    let report = RunReport::new(
        config.clone(),
        vec![
            Verdict::new("rho_emp", r.rho_emp, Relation::Le, r.rho_formula + config.tolerances.rho_slack),
            Verdict::new("min_target_distance", r.min_target_distance, Relation::Ge, n.target_r),
        ],
        constants([
            ("rho_emp", r.rho_emp),
            ("rho_formula", r.rho_formula),
            ("max_left_emp", r.max_left_emp),
            ("min_target_distance", r.min_target_distance),
            ("min_literal_target_distance", r.min_literal_target_distance),
            ("max_barrier_violation", r.max_barrier_violation),
        ]),
        details,
    );
    Ok(RunOutput {
        report,
        artifacts: vec![("runs.csv".into(), csv)],
    })
}

fn contraction(config: &ScenarioConfig) -> Result<RunOutput, Error> {
    let c = &config.contraction;
    let g = grid(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let log_max = c.max_amplitude.log10();
    let pairs: Vec<(InitialDatum, InitialDatum)> = (0..c.n_pairs)
        .map(|_| {
            let (pa, pb) = (rng.gen_range(-1.0..=0.0), rng.gen_range(-1.0..=0.0));
            let a = InitialDatum::random(&mut rng, 10f64.powf(log_max + pa * (log_max + 1.0)));
            let b = InitialDatum::random(&mut rng, 10f64.powf(log_max + pb * (log_max + 1.0)));
            (a, b)
        })
        .collect();
    let seeds: Vec<u64> = (0..c.n_linear).map(|_| rng.gen()).collect();
    let nonlinear = pairs
        .par_iter()
        .map(|(a, b)| l1_difference_increase(&solve(config, g, a)?, &solve(config, g, b)?))
        .collect::<Result<Vec<f64>, Error>>()?;
    let linear = seeds
        .par_iter()
        .map(|&s| {
            let mut r = ChaCha8Rng::seed_from_u64(s);
            let coeff = RandomCoefficient::draw(&mut r, 3, config.t_end, c.rho).sample(g, config.t_end, config.dt())?;
            let w0 = RandomDatum::draw(&mut r, DatumKind::Dipole).sample(g);
            let w = solve_linear(&LinearProblem::forward(config.nu, coeff, w0, 0.0, config.t_end, config.dt()))?;
            Ok(l1_increase(&w))
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    let worst = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut verdicts = Vec::new();
    let mut consts = Constants::new();
    if !nonlinear.is_empty() {
        verdicts.push(Verdict::new("nonlinear_l1_increase", worst(&nonlinear), Relation::Le, config.tolerances.l1_slack));
        consts.insert("nonlinear_l1_increase".into(), worst(&nonlinear));
    }
    if !linear.is_empty() {
        verdicts.push(Verdict::new("linear_l1_increase", worst(&linear), Relation::Le, config.tolerances.l1_slack));
        consts.insert("linear_l1_increase".into(), worst(&linear));
    }
    let report = RunReport::new(
        config.clone(),
        verdicts,
        consts,
        json!({ "nonlinear": nonlinear, "linear": linear }),
    );
    Ok(RunOutput {
        report,
        artifacts: Vec::new(),
    })
}
