//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use burgers_control::analysis::{
    ensemble_dichotomy, harnack_probe, run_ensemble, BoundedCoefficient, DatumKind, EnsembleSpec, RandomCoefficient,
    RandomDatum,
};
use burgers_control::barriers::{non_controllability_experiment, NonControlSpec};
use burgers_control::control::{build_controlled_trajectory, fit_decay, ControlSetup, CutoffSystem};
use burgers_control::grid::{interpolation_ratio, Field, Grid, Interval};
use burgers_control::presets::{demo_forcing, Forcing, InitialDatum};
use burgers_control::solver::{
    duality_pairing_drift, l1_difference_increase, l1_increase, max_principle_excess, solve_burgers, solve_dual,
    solve_linear, BurgersProblem, LinearProblem, SpaceTimeFn,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sup(f: &Field<f64>) -> f64 {
    f.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn manufactured_solution() -> Outcome {
    let start = Instant::now();
    let nu = 0.1;
    let h = SpaceTimeFn::new(move |t: f64, x: f64| {
        let e = (-t).exp();
        let (s, c) = (PI * x).sin_cos();
        e * s * (nu * PI * PI - 1.0) + e * e * PI * s * c
    });
    let mut errors = Vec::new();
    for n in [64, 128, 256, 512] {
        let g = Grid::<f64>::new(n).map_err(|e| e.to_string())?;
        let u0 = Field::dirichlet_from_fn(g, |x| (PI * x).sin());
        let u = solve_burgers(&BurgersProblem::new(nu, u0, 0.0, 1.0).with_forcing(h.clone())).map_err(|e| e.to_string())?;
        let err = u
            .frames()
            .iter()
            .enumerate()
            .map(|(k, f)| {
                let decay = (-u.time(k)).exp();
                f.values()
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v - decay * (PI * g.x(i)).sin()).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        errors.push(err);
    }
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let worst = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    check(
        worst >= 1.9 && elapsed < Duration::from_secs(30),
        format!("orders {orders:.3?}, min {worst:.3}, errors {errors:?}, {elapsed:.1?}"),
    )
}

fn maximum_principle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = Grid::<f64>::new(128).map_err(|e| e.to_string())?;
    let cases: Vec<(InitialDatum, Forcing)> = (0..50)
        .map(|_| {
            let amp = 10f64.powf(rng.gen_range(-1.0..2.0));
            let u0 = InitialDatum::random(&mut rng, amp);
            let k = rng.gen_range(1..5);
            let h_amp = rng.gen_range(0.0..5.0);
            let h = if rng.gen_bool(0.5) {
                Forcing::Sine { k, amp: h_amp }
            } else {
                Forcing::SineCosine { k, amp: h_amp, omega: rng.gen_range(0.0..10.0) }
            };
            (u0, h)
        })
        .collect();
    let results: Vec<Result<(f64, f64), String>> = cases
        .par_iter()
        .map(|(u0, h)| {
            let f = u0.sample(g);
            let scale = 0.02 * (1.0 + sup(&f));
            let u = solve_burgers(&BurgersProblem::new(0.1, f, 0.0, 1.0).with_forcing(h.to_fn()))
                .map_err(|e| e.to_string())?;
            Ok((max_principle_excess(&u, h.sup()), scale))
        })
        .collect();
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    for r in results {
        let (excess, slack) = r?;
        worst = worst.max(excess / slack);
        if excess > slack {
            failures += 1;
        }
    }
    check(failures == 0, format!("50 scenarios, {failures} failures, worst excess/slack {worst:.3}"))
}

fn universal_bound() -> Outcome {
    let g = Grid::<f64>::new(256).map_err(|e| e.to_string())?;
    let mut cases = Vec::new();
    for amp in [10.0, 100.0, 1000.0] {
        for d in [
            InitialDatum::Sine { k: 1, amp },
            InitialDatum::Sine { k: 1, amp: -amp },
            InitialDatum::Sine { k: 2, amp },
            InitialDatum::ConstantClip { value: amp },
        ] {
            cases.push(d);
        }
    }
    let sups = cases
        .par_iter()
        .map(|d| {
            solve_burgers(&BurgersProblem::new(0.1, d.sample(g), 0.0, 1.0))
                .map(|u| sup(u.last()))
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let worst = sups.iter().copied().fold(0.0, f64::max);
    check(worst <= 2.05, format!("max ‖u(1)‖∞ = {worst:.4} over {} data (bound 2.05)", sups.len()))
}

fn l1_contraction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = Grid::<f64>::new(128).map_err(|e| e.to_string())?;
    let pairs: Vec<(InitialDatum, InitialDatum, Forcing)> = (0..50)
        .map(|_| {
            let (amp_a, amp_b) = (10f64.powf(rng.gen_range(-1.0..1.5)), 10f64.powf(rng.gen_range(-1.0..1.5)));
            let a = InitialDatum::random(&mut rng, amp_a);
            let b = InitialDatum::random(&mut rng, amp_b);
            let h = Forcing::Sine { k: rng.gen_range(1..4), amp: rng.gen_range(0.0..2.0) };
            (a, b, h)
        })
        .collect();
    let nonlinear = pairs
        .par_iter()
        .map(|(a, b, h)| {
            let solve = |d: &InitialDatum| solve_burgers(&BurgersProblem::new(0.1, d.sample(g), 0.0, 1.0).with_forcing(h.to_fn()));
            let (u, v) = (solve(a).map_err(|e| e.to_string())?, solve(b).map_err(|e| e.to_string())?);
            l1_difference_increase(&u, &v).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let seeds: Vec<u64> = (0..50).map(|_| rng.gen()).collect();
    let linear = seeds
        .par_iter()
        .map(|&s| {
            let mut r = ChaCha8Rng::seed_from_u64(s);
            let scale = r.gen_range(0.5..10.0);
            let coeff = RandomCoefficient::draw(&mut r, 3, 1.0, scale);
            let w0 = RandomDatum::draw(&mut r, DatumKind::Dipole).sample(g);
            let a = coeff.sample(g, 1.0, g.dx()).map_err(|e| e.to_string())?;
            let w = solve_linear(&LinearProblem::forward(0.1, a, w0, 0.0, 1.0, g.dx())).map_err(|e| e.to_string())?;
            Ok(l1_increase(&w))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let fails = nonlinear.iter().chain(&linear).filter(|&&d| d > 1e-6).count();
    let worst = nonlinear.iter().chain(&linear).copied().fold(f64::NEG_INFINITY, f64::max);
    check(fails == 0, format!("50 nonlinear + 50 linear runs, {fails} failures, max step increase {worst:.2e}"))
}

fn stabilisation() -> Outcome {
    let start = Instant::now();
    let g = Grid::<f64>::new(256).map_err(|e| e.to_string())?;
    let support = Interval::new(0.3, 0.7).map_err(|e| e.to_string())?;
    let cutoffs = CutoffSystem::with_default_inner(support).map_err(|e| e.to_string())?;
    let setup = ControlSetup::new(0.1, cutoffs, 10).with_forcing(demo_forcing().to_fn());
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let pairs: Vec<(InitialDatum, InitialDatum)> = (0..20)
        .map(|_| {
            let (amp_a, amp_b) = (rng.gen_range(0.2..2.0), rng.gen_range(0.2..1.0));
            let a = InitialDatum::random(&mut rng, amp_a);
            let b = InitialDatum::random(&mut rng, amp_b);
            (a, b)
        })
        .collect();
    let runs = pairs
        .par_iter()
        .map(|(a, b)| {
            let run = build_controlled_trajectory(&a.sample(g), &b.sample(g), &setup).map_err(|e| e.to_string())?;
            let decay = fit_decay(&run.errors_at_integers()).map_err(|e| e.to_string())?;
            let ratios_ok = run.cycles.iter().filter(|c| c.k % 2 == 0).all(|c| c.ratio <= decay.theta);
            let z: Vec<f64> = run.cycles.iter().filter(|c| c.k % 2 == 0).map(|c| c.zeta_h1_max).collect();
            let zeta_decay_ok = z
                .iter()
                .enumerate()
                .all(|(j, &zk)| zk <= 10.0 * z[0] * decay.theta.powi(j as i32) + 1e-12);
            Ok((decay.theta, decay.gamma, ratios_ok, run.zeta_support_violation(), zeta_decay_ok))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let theta = runs.iter().map(|r| r.0).fold(0.0, f64::max);
    let gamma = runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let ratios = runs.iter().all(|r| r.2);
    let support_violation = runs.iter().map(|r| r.3).fold(0.0, f64::max);
    let zeta = runs.iter().all(|r| r.4);
    let elapsed = start.elapsed();
    check(
        theta < 0.999 && gamma > 0.0 && ratios && support_violation == 0.0 && zeta && elapsed < Duration::from_secs(300),
        format!(
            "20 pairs: max θ {theta:.4}, min γ {gamma:.3}, ratios ≤ θ {ratios}, ζ support violation {support_violation:e}, ζ decay {zeta}, {elapsed:.1?}"
        ),
    )
}

fn interpolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let g = Grid::<f64>::new(256).map_err(|e| e.to_string())?;
    let mut c3 = 0.0f64;
    let mut scale_dev = 0.0f64;
    for _ in 0..200 {
        let amp = 10f64.powf(rng.gen_range(-2.0..2.0));
        let f = InitialDatum::random(&mut rng, amp).sample(g);
        let r = interpolation_ratio(&f).map_err(|e| e.to_string())?;
        if !r.is_finite() {
            return Err(format!("non-finite ratio {r}"));
        }
        c3 = c3.max(r);
        for s in [1e-3, 7.0, 1e3] {
            let rs = interpolation_ratio(&f.scale(s)).map_err(|e| e.to_string())?;
            scale_dev = scale_dev.max((rs - r).abs() / r);
        }
    }
    check(
        c3.is_finite() && scale_dev <= 1e-10,
        format!("200 fields: C3_emp = {c3:.4}, max relative change under scaling {scale_dev:.1e}"),
    )
}

fn harnack() -> Outcome {
    let g = Grid::<f64>::new(128).map_err(|e| e.to_string())?;
    let heat = BoundedCoefficient::zero(g, 1.0, g.dx()).map_err(|e| e.to_string())?;
    let w0 = Field::dirichlet_from_fn(g, |x| (PI * x).sin());
    let k = Interval::new(0.25, 0.75).map_err(|e| e.to_string())?;
    let est = harnack_probe(1.0, &heat, &w0, k, 2.0 / 3.0, 1.0).map_err(|e| e.to_string())?;
    let exact = 2f64.sqrt() * (PI * PI / 3.0).exp();
    let rel = (est.ratio - exact).abs() / exact;
    let coarse = run_ensemble::<f64>(&EnsembleSpec::default()).map_err(|e| e.to_string())?;
    let fine = run_ensemble::<f64>(&EnsembleSpec::default().with_n_cells(256)).map_err(|e| e.to_string())?;
    let drift = (fine.c_emp - coarse.c_emp).abs() / coarse.c_emp;
    check(
        rel <= 0.01 && drift <= 0.2,
        format!(
            "heat ratio {:.4} vs {exact:.4} (rel {rel:.1e}); C_emp {:.4} (n=128) vs {:.4} (n=256), change {:.1}%",
            est.ratio,
            coarse.c_emp,
            fine.c_emp,
            100.0 * drift
        ),
    )
}

fn dichotomy() -> Outcome {
    let a = run_ensemble::<f64>(&EnsembleSpec::default()).map_err(|e| e.to_string())?;
    let b = run_ensemble::<f64>(&EnsembleSpec::default().with_seed(2)).map_err(|e| e.to_string())?;
    let coverage = 1.0 - ensemble_dichotomy(&a.outcomes, a.q_star, a.eps_star);
    let dq = (b.q_star - a.q_star).abs() / a.q_star;
    let de = (b.eps_star - a.eps_star).abs() / a.eps_star;
    check(
        a.q_star < 1.0 && a.eps_star > 0.0 && coverage == 1.0 && dq < 0.25 && de < 0.25,
        format!(
            "(q*, ε*) = ({:.4}, {:.4}), coverage {:.0}%; seed 2: ({:.4}, {:.4}), changes {:.1}% / {:.1}%",
            a.q_star,
            a.eps_star,
            100.0 * coverage,
            b.q_star,
            b.eps_star,
            100.0 * dq,
            100.0 * de
        ),
    )
}

fn non_controllability() -> Outcome {
    let r = non_controllability_experiment(&NonControlSpec::default()).map_err(|e| e.to_string())?;
    let min_distance = r.runs.iter().map(|x| x.target_distance).fold(f64::INFINITY, f64::min);
    check(
        r.rho_emp <= 21.2 + 0.5 && min_distance >= 10.0,
        format!(
            "{} runs: rho_emp {:.4} vs rho_formula {:.4}; min target distance {:.3} (R = 10); barrier violation {:.1e}",
            r.n_runs, r.rho_emp, r.rho_formula, min_distance, r.max_barrier_violation
        ),
    )
}

fn duality_drift() -> Outcome {
    let mut drifts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let coeff = RandomCoefficient::draw(&mut rng, 3, 1.0, 2.0);
    let w0 = RandomDatum::draw(&mut rng, DatumKind::Fourier);
    let z1 = RandomDatum::draw(&mut rng, DatumKind::Bump);
    for (n, dt) in [(256, 1e-3), (512, 5e-4)] {
        let g = Grid::<f64>::new(n).map_err(|e| e.to_string())?;
        let a = coeff.sample(g, 1.0, g.dx()).map_err(|e| e.to_string())?;
        let w = solve_linear(&LinearProblem::forward(0.1, a.clone(), w0.sample(g), 0.0, 1.0, dt)).map_err(|e| e.to_string())?;
        let z = solve_dual(&LinearProblem::dual(0.1, a, z1.sample(g), 0.0, 1.0, dt)).map_err(|e| e.to_string())?;
        drifts.push(duality_pairing_drift(&w, &z).map_err(|e| e.to_string())?);
    }
    check(
        drifts[0] <= 1e-2 && drifts[1] <= 0.5 * drifts[0],
        format!("drift {:.2e} (n=256, dt=1e-3), {:.2e} (n=512, dt=5e-4)", drifts[0], drifts[1]),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("manufactured-solution convergence", manufactured_solution),
        ("maximum principle", maximum_principle),
        ("universal L∞ bound", universal_bound),
        ("L¹ contraction", l1_contraction),
        ("stabilisation", stabilisation),
        ("interpolation inequality", interpolation),
        ("Harnack probe", harnack),
        ("dichotomy frontier", dichotomy),
        ("non-controllability", non_controllability),
        ("duality drift", duality_drift),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
