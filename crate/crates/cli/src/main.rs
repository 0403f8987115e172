use burgers_control_cli::config::{self, default_preset, preset, PRESET_NAMES};
use burgers_control_cli::{load_config, run_experiment, run_sweep, write_outputs, Axis, ExperimentKind, Overrides, Status};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Stabilisation experiments for the 1D viscous Burgers equation.
///
/// Exit status: 0 when every verdict passes, 2 when a verdict fails (the
/// report is still written), 1 on configuration or solver errors.
#[derive(Debug, Parser)]
#[command(name = "burgers-control", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the uncontrolled equation and check the maximum principle.
    Simulate(RunArgs),
    /// Build the cycle-by-cycle control and fit the decay of the error.
    Stabilize(RunArgs),
    /// Random linear ensemble: dichotomy frontier and coverage.
    Dichotomy(RunArgs),
    /// Random linear ensemble plus the heat-equation Harnack oracle.
    Harnack(RunArgs),
    /// Residual signs of the global barriers and the sandwich around a solution.
    Barrier(RunArgs),
    /// Bound on the left of the control support under adversarial controls.
    #[command(name = "noncontrol", alias = "non-controllability")]
    NonControl(RunArgs),
    /// L¹ contraction for random nonlinear pairs and linear problems.
    Contraction(RunArgs),
    /// Run a base scenario over the product of `--vary` lists.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    preset: Option<String>,
    /// Output directory for report.json and CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_cells: Option<usize>,
    /// Frame spacing.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// `key=v1,v2,…`; dotted keys reach into tables. Repeatable.
    #[arg(long, value_name = "KEY=VALUES")]
    vary: Vec<Axis>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn scenario_text(common: &Common, kind: Option<ExperimentKind>) -> Result<String, String> {
    if let Some(path) = &common.config {
        return std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()));
    }
    match (&common.preset, kind) {
        (Some(name), _) => Ok(preset(name).expect("clap restricts preset names").to_string()),
        (None, Some(kind)) => Ok(default_preset(kind).to_string()),
        (None, None) => Err("sweep needs --config or --preset".into()),
    }
}

fn overrides(common: &Common, kind: Option<ExperimentKind>) -> Overrides {
    Overrides {
        experiment: kind,
        seed: common.seed,
        n_cells: common.n_cells,
        dt: common.dt,
        out: common.out.as_ref().map(|p| p.display().to_string()),
    }
}

fn run_one(kind: ExperimentKind, args: &RunArgs) -> Result<Status, String> {
    let text = scenario_text(&args.common, Some(kind))?;
    let config = load_config(&text, &overrides(&args.common, Some(kind))).map_err(|e| e.to_string())?;
    let output = run_experiment(&config).map_err(|e| e.to_string())?;
    if let Some(dir) = &config.output.dir {
        write_outputs(Path::new(dir), &output).map_err(|e| format!("cannot write to {dir}: {e}"))?;
    }
    print!("{}", output.report.summary());
    Ok(if output.report.passed { Status::Pass } else { Status::Fail })
}

fn sweep(args: &SweepArgs) -> Result<Status, String> {
    let text = scenario_text(&args.common, None)?;
    let base = config::parse_table(&text).map_err(|e| e.to_string())?;
    let mut o = overrides(&args.common, None);
    o.out = None;
    let out = args.common.out.as_deref();
    let report = run_sweep(&base, &o, &args.vary, args.jobs, out).map_err(|e| e.to_string())?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        let json = serde_json::to_string_pretty(&report).expect("sweep report serialises");
        std::fs::write(dir.join("sweep.json"), json).map_err(|e| e.to_string())?;
        std::fs::write(dir.join("sweep.csv"), report.to_csv()).map_err(|e| e.to_string())?;
    }
    for e in &report.entries {
        let params: Vec<String> = e.assignments.iter().map(|(k, v)| format!("{k}={v}")).collect();
        match &e.error {
            Some(err) => println!("run {:04} [{}] {}: {err}", e.index, e.status.as_str(), params.join(" ")),
            None => println!("run {:04} [{}] {}", e.index, e.status.as_str(), params.join(" ")),
        }
    }
    println!("sweep: {} runs, {}", report.n_runs, report.status.as_str());
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => run_one(ExperimentKind::Simulate, a),
        Command::Stabilize(a) => run_one(ExperimentKind::Stabilize, a),
        Command::Dichotomy(a) => run_one(ExperimentKind::Dichotomy, a),
        Command::Harnack(a) => run_one(ExperimentKind::Harnack, a),
        Command::Barrier(a) => run_one(ExperimentKind::Barrier, a),
        Command::NonControl(a) => run_one(ExperimentKind::NonControllability, a),
        Command::Contraction(a) => run_one(ExperimentKind::Contraction, a),
        Command::Sweep(a) => sweep(a),
    };
    let status = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        Status::Error
    });
    ExitCode::from(status.exit_code() as u8)
}
