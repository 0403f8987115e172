//! Parameter sweeps: the Cartesian product of `--vary key=v1,v2,…` lists
//! applied to a base scenario, run on a bounded thread pool.

use crate::config::{assign, load_table, ConfigError, Overrides};
use crate::run::run_experiment;
use crate::{write_outputs, Status};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

/// One `key=v1,v2,…` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

impl std::str::FromStr for Axis {
    type Err = String;

    /// Values are split on commas outside brackets, so `support=[0.2,0.6],[0.3,0.7]` has two values.
    fn from_str(s: &str) -> Result<Self, String> {
        let (key, rest) = s.split_once('=').ok_or_else(|| format!("expected key=v1,v2,…, got {s:?}"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(format!("missing key in {s:?}"));
        }
        let mut values = Vec::new();
        let (mut depth, mut cur) = (0i32, String::new());
        for ch in rest.chars() {
            match ch {
                '[' | '{' => depth += 1,
                ']' | '}' => depth -= 1,
                ',' if depth == 0 => {
                    values.push(std::mem::take(&mut cur));
                    continue;
                }
                _ => {}
            }
            cur.push(ch);
        }
        values.push(cur);
        let values: Vec<String> = values.into_iter().map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
        Ok(Axis { key: key.to_string(), values })
    }
}

/// Every combination, first axis slowest. Empty if any axis is empty.
pub fn combinations(axes: &[Axis]) -> Vec<Vec<(String, String)>> {
    let mut combos = vec![Vec::new()];
    for axis in axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |v| {
                    let mut next = c.clone();
                    next.push((axis.key.clone(), v.clone()));
                    next
                })
            })
            .collect();
    }
    if axes.is_empty() {
        Vec::new()
    } else {
        combos
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub index: usize,
    pub assignments: BTreeMap<String, String>,
    pub status: Status,
    pub passed: bool,
    pub constants: BTreeMap<String, f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub n_runs: usize,
    pub status: Status,
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    /// Long table `index,status,key,value`, one row per assignment and constant.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,status,kind,key,value\n");
        for e in &self.entries {
            for (k, v) in &e.assignments {
                out.push_str(&format!("{},{},param,{k},{}\n", e.index, e.status.as_str(), csv_field(v)));
            }
            for (k, v) in &e.constants {
                out.push_str(&format!("{},{},constant,{k},{v:e}\n", e.index, e.status.as_str()));
            }
        }
        out
    }
}

fn csv_field(v: &str) -> String {
    if v.contains([',', '"', '\n']) {
        format!("\"{}\"", v.replace('"', "\"\""))
    } else {
        v.to_string()
    }
}

/// Runs every combination of `axes` over `base` using `jobs` threads and
/// writes each run into `out/run-NNNN/` when `out` is given. The result does
/// not depend on `jobs`.
pub fn run_sweep(
    base: &toml::Table,
    overrides: &Overrides,
    axes: &[Axis],
    jobs: usize,
    out: Option<&Path>,
) -> Result<SweepReport, ConfigError> {
    let combos = combinations(axes);
    let configs = combos
        .iter()
        .map(|assignments| {
            let mut table = base.clone();
            for (k, v) in assignments {
                assign(&mut table, k, v)?;
            }
            Ok(table)
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ConfigError::Invalid(vec![format!("jobs: {e}")]))?;
    let entries: Vec<SweepEntry> = pool.install(|| {
        configs
            .into_par_iter()
            .zip(combos.par_iter())
            .enumerate()
            .map(|(index, (table, assignments))| {
                let assignments: BTreeMap<String, String> = assignments.iter().cloned().collect();
                let fail = |e: String| SweepEntry {
                    index,
                    assignments: assignments.clone(),
                    status: Status::Error,
                    passed: false,
                    constants: BTreeMap::new(),
                    error: Some(e),
                };
                let config = match load_table(table, overrides) {
                    Ok(c) => c,
                    Err(e) => return fail(e.to_string()),
                };
                match run_experiment(&config) {
                    Ok(output) => {
                        if let Some(dir) = out {
                            if let Err(e) = write_outputs(&dir.join(format!("run-{index:04}")), &output) {
                                return fail(e.to_string());
                            }
                        }
                        let passed = output.report.passed;
                        SweepEntry {
                            index,
                            assignments,
                            status: if passed { Status::Pass } else { Status::Fail },
                            passed,
                            constants: output.report.constants,
                            error: None,
                        }
                    }
                    Err(e) => fail(e.to_string()),
                }
            })
            .collect()
    });
    let status = entries.iter().map(|e| e.status).max().unwrap_or(Status::Pass);
    Ok(SweepReport {
        n_runs: entries.len(),
        status,
        entries,
    })
}
