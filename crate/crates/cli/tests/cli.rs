use burgers_control_cli::config::{preset, PRESET_NAMES};
use burgers_control_cli::{load_config, parse_config, run_experiment, ExperimentKind, Overrides, Status};
use std::path::Path;
use std::process::{Command, Stdio};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_burgers-control"));
    cmd.stdout(Stdio::null());
    cmd
}

fn report_without_time(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

#[test]
fn defaults_are_filled_in() {
    let c = parse_config("experiment = \"stabilize\"").unwrap();
    assert_eq!(c.control_support, [0.3, 0.7]);
    let quarter = (0.7 - 0.3) / 4.0;
    assert_eq!(c.inner, Some([0.3 + quarter, 0.7 - quarter]));
    assert_eq!(c.dt, Some(1.0 / c.n_cells as f64));
}

#[test]
fn reversed_support_is_reported() {
    let err = parse_config("experiment = \"stabilize\"\ncontrol_support = [0.8, 0.2]").unwrap_err();
    assert!(err.to_string().contains("control_support reversed"), "{err}");
}

#[test]
fn zero_datum_stays_zero() {
    let c = parse_config("experiment = \"simulate\"\nn_cells = 32").unwrap();
    let out = run_experiment(&c).unwrap();
    assert!(out.report.passed);
    for k in ["l1_final", "l2_final", "linf_final", "h1_final"] {
        assert_eq!(out.report.constants[k], 0.0, "{k}");
    }
}

#[test]
fn demo_preset_stabilises() {
    let c = load_config(preset("paper-demo").unwrap(), &Overrides { n_cells: Some(64), ..Default::default() }).unwrap();
    assert_eq!(c.experiment, ExperimentKind::Stabilize);
    let out = run_experiment(&c).unwrap();
    let k = &out.report.constants;
    assert!(k["theta"] < 1.0 && k["gamma"] > 0.0, "{k:?}");
    assert!(out.report.passed);
    let csv = &out.artifacts.iter().find(|(n, _)| n == "cycles.csv").unwrap().1;
    assert_eq!(csv.lines().count(), c.n_cycles + 1);
}

#[test]
fn every_preset_passes_at_small_size() {
    for name in PRESET_NAMES {
        let mut table = burgers_control_cli::config::parse_table(preset(name).unwrap()).unwrap();
        for (k, v) in [("ensemble.n_scenarios", "12"), ("noncontrol.n_controls", "3"), ("contraction.n_pairs", "4"), ("contraction.n_linear", "4")] {
            burgers_control_cli::config::assign(&mut table, k, v).unwrap();
        }
        let c = burgers_control_cli::config::load_table(table, &Overrides { n_cells: Some(64), ..Default::default() }).unwrap();
        let out = run_experiment(&c).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(out.report.passed, "{name}: {}", out.report.summary());
    }
}

#[test]
fn noncontrol_preset_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("nc.toml");
    std::fs::write(
        &cfg,
        "experiment = \"noncontrol\"\n[noncontrol]\namplitudes = [1.0, 100.0]\nn_controls = 3\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["noncontrol", "--n-cells", "64", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = report_without_time(&out.join("report.json"));
    assert!(report["details"].get("runs").is_none());
    assert!(report["constants"]["rho_emp"].as_f64().unwrap() <= report["constants"]["rho_formula"].as_f64().unwrap());
    let runs = std::fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 3 * 2 * 3);
}

#[test]
fn identical_configs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let reports: Vec<_> = (0..3)
        .map(|i| {
            let out = dir.path().join(format!("r{i}"));
            let status = bin()
                .args(["dichotomy", "--n-cells", "32", "--seed", "5", "--out"])
                .arg(&out)
                .status()
                .unwrap();
            assert_eq!(status.code(), Some(0));
            let mut v = report_without_time(&out.join("report.json"));
            v["config"]["output"]["dir"] = serde_json::Value::Null;
            (serde_json::to_string(&v).unwrap(), std::fs::read(out.join("scenarios.csv")).unwrap())
        })
        .collect();
    assert!(reports.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["simulate", "--preset", "nope"]), Some(1));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "experiment = \"stabilize\"\ncontrol_support = [0.7, 0.3]\n").unwrap();
    let out = bin().args(["stabilize", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("control_support reversed"));

    let strict = dir.path().join("strict.toml");
    std::fs::write(
        &strict,
        "experiment = \"stabilize\"\nn_cells = 32\nn_cycles = 4\nu0 = { kind = \"sine\", k = 1, amp = 0.8 }\n[tolerances]\ntheta_max = 0.01\n",
    )
    .unwrap();
    let out_dir = dir.path().join("strict");
    let status = bin().args(["stabilize", "--config"]).arg(&strict).arg("--out").arg(&out_dir).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let report = report_without_time(&out_dir.join("report.json"));
    assert_eq!(report["passed"], false);

    let mismatch = bin().args(["harnack", "--config"]).arg(&strict).output().unwrap();
    assert_eq!(mismatch.status.code(), Some(1));
}

#[test]
fn empty_sweep_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["sweep", "--preset", "simulate-demo", "--vary", "nu=", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(v["n_runs"], 0);
}

#[test]
fn sweep_reports_worst_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["sweep", "--preset", "paper-demo", "--n-cells", "32", "--jobs", "3"])
        .args(["--vary", "n_cycles=4,6", "--vary", "tolerances.theta_max=0.999,0.01", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(Status::Fail.exit_code()));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    let statuses: Vec<&str> = v["entries"].as_array().unwrap().iter().map(|e| e["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["pass", "fail", "pass", "fail"]);
    assert!(dir.path().join("run-0003/cycles.csv").exists());
}
