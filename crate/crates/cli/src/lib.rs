//! Scenario runner for the `burgers-control` experiments: TOML configs,
//! JSON/CSV reports and parameter sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;
pub mod run;
pub mod sweep;

use serde::Serialize;
use std::path::Path;

pub use config::{load_config, parse_config, ConfigError, ExperimentKind, Overrides, ScenarioConfig};
pub use report::{Relation, RunReport, Verdict};
pub use run::{run_experiment, RunOutput};
pub use sweep::{run_sweep, Axis, SweepReport};

/// Outcome of a run, ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    /// Process exit code: 0 pass, 2 failed verdict, 1 error.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Error => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// Writes `report.json` and every artifact into `dir`, creating it.
pub fn write_outputs(dir: &Path, output: &RunOutput) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), output.report.to_json())?;
    for (name, body) in &output.artifacts {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}
