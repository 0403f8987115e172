//! Scenario files: a TOML document with top-level problem data and one
//! optional table per experiment family.
//!
//! ```toml
//! experiment = "stabilize"
//! nu = 0.1
//! n_cells = 128
//! n_cycles = 10
//! control_support = [0.3, 0.7]
//! forcing = { kind = "sine", k = 2, amp = 0.5 }
//! u0 = { kind = "sine", k = 1, amp = 0.8 }
//! u_hat0 = { kind = "sine", k = 3, amp = -0.5 }
//! ```
//!
//! Omitted `dt` resolves to `1 / n_cells`; omitted `inner` resolves to the
//! middle half of `control_support`.

use burgers_control::presets::{Forcing, InitialDatum};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Simulate,
    Stabilize,
    Dichotomy,
    Harnack,
    Barrier,
    #[serde(alias = "noncontrol")]
    NonControllability,
    Contraction,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Stabilize => "stabilize",
            ExperimentKind::Dichotomy => "dichotomy",
            ExperimentKind::Harnack => "harnack",
            ExperimentKind::Barrier => "barrier",
            ExperimentKind::NonControllability => "non-controllability",
            ExperimentKind::Contraction => "contraction",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse scenario: {0}")]
    Syntax(String),
    #[error("invalid scenario:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Upper limit for the fitted per-cycle contraction factor.
    pub theta_max: f64,
    /// Relative slack of the maximum-principle and barrier checks.
    pub max_principle: f64,
    /// Absolute slack of the per-step L¹ contraction check.
    pub l1_slack: f64,
    /// Relative slack of the barrier comparisons.
    pub barrier: f64,
    /// Additive slack on the non-controllability bound.
    pub rho_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            theta_max: 0.999,
            max_principle: 1e-9,
            l1_slack: 1e-6,
            barrier: 1e-3,
            rho_slack: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSection {
    pub rho: f64,
    pub n_scenarios: usize,
    pub n_modes: usize,
    pub fill: f64,
    pub harnack_set: [f64; 2],
    /// Optional `(q, ε)` at which the dichotomy coverage is also reported.
    pub q: Option<f64>,
    pub eps: Option<f64>,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            rho: 2.0,
            n_scenarios: 100,
            n_modes: 3,
            fill: 0.95,
            harnack_set: [0.25, 0.75],
            q: None,
            eps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BarrierSection {
    pub eps: Vec<f64>,
}

impl Default for BarrierSection {
    fn default() -> Self {
        Self { eps: vec![1.0, 0.1, 0.01] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonControlSection {
    pub delta: f64,
    pub a: f64,
    pub amplitudes: Vec<f64>,
    pub n_controls: usize,
    pub controls_in: [f64; 2],
    pub max_control: f64,
    pub target_r: f64,
    pub barrier_eps: f64,
}

impl Default for NonControlSection {
    fn default() -> Self {
        Self {
            delta: 0.25,
            a: 0.5,
            amplitudes: vec![1.0, 10.0, 100.0, 1000.0],
            n_controls: 10,
            controls_in: [0.5, 0.8],
            max_control: 1000.0,
            target_r: 10.0,
            barrier_eps: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContractionSection {
    pub n_pairs: usize,
    pub max_amplitude: f64,
    pub n_linear: usize,
    pub rho: f64,
}

impl Default for ContractionSection {
    fn default() -> Self {
        Self {
            n_pairs: 20,
            max_amplitude: 10.0,
            n_linear: 20,
            rho: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<String>,
    /// Also write `fields.csv` with the full trajectory.
    pub fields: bool,
}

fn default_nu() -> f64 {
    0.1
}
fn default_n_cells() -> usize {
    128
}
fn default_t_end() -> f64 {
    1.0
}
fn default_n_cycles() -> usize {
    10
}
fn default_support() -> [f64; 2] {
    [0.3, 0.7]
}
fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_n_cells")]
    pub n_cells: usize,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_n_cycles")]
    pub n_cycles: usize,
    #[serde(default = "default_support")]
    pub control_support: [f64; 2],
    #[serde(default)]
    pub inner: Option<[f64; 2]>,
    #[serde(default)]
    pub forcing: Forcing,
    #[serde(default)]
    pub u0: InitialDatum,
    #[serde(default)]
    pub u_hat0: InitialDatum,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub barrier: BarrierSection,
    #[serde(default)]
    pub noncontrol: NonControlSection,
    #[serde(default)]
    pub contraction: ContractionSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl ScenarioConfig {
    /// Frame spacing; always set after [`parse_config`].
    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or(1.0 / self.n_cells as f64)
    }

    /// Inner interval `I′`; always set after [`parse_config`].
    pub fn inner(&self) -> [f64; 2] {
        self.inner.unwrap_or_else(|| {
            let [a, b] = self.control_support;
            [a + 0.25 * (b - a), b - 0.25 * (b - a)]
        })
    }

    fn resolve(&mut self) {
        self.dt = Some(self.dt());
        self.inner = Some(self.inner());
    }

    fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let mut need = |ok: bool, msg: String| {
            if !ok {
                v.push(msg);
            }
        };
        let positive = |x: f64| x.is_finite() && x > 0.0;
        need(positive(self.nu), format!("nu: must be positive and finite, got {}", self.nu));
        need(self.n_cells >= 8, format!("n_cells: must be at least 8, got {}", self.n_cells));
        if let Some(dt) = self.dt {
            need(positive(dt), format!("dt: must be positive and finite, got {dt}"));
            if self.experiment == ExperimentKind::Stabilize {
                need(dt <= 1.0, format!("dt: must not exceed the unit cycle, got {dt}"));
            }
        }
        need(positive(self.t_end), format!("t_end: must be positive and finite, got {}", self.t_end));
        need(self.n_cycles >= 1, "n_cycles: must be at least 1".into());

        let [a, b] = self.control_support;
        let support_ok = a < b && a > 0.0 && b < 1.0;
        if a >= b {
            v.push(format!("control_support reversed: a = {a} must be below b = {b}"));
        } else if !support_ok {
            v.push(format!("control_support: must lie inside (0, 1), got [{a}, {b}]"));
        }
        if let (true, Some([ai, bi])) = (support_ok, self.inner) {
            if !(a < ai && ai < bi && bi < b) {
                v.push(format!(
                    "inner: need a < a' < b' < b, got [{ai}, {bi}] inside control_support [{a}, {b}]"
                ));
            }
        }
        for (key, r) in [
            ("forcing", self.forcing.validate()),
            ("u0", self.u0.validate()),
            ("u_hat0", self.u_hat0.validate()),
        ] {
            if let Err(e) = r {
                v.push(format!("{key}: {e}"));
            }
        }

        let t = &self.tolerances;
        for (key, x) in [
            ("tolerances.max_principle", t.max_principle),
            ("tolerances.l1_slack", t.l1_slack),
            ("tolerances.barrier", t.barrier),
            ("tolerances.rho_slack", t.rho_slack),
        ] {
            if !(x.is_finite() && x >= 0.0) {
                v.push(format!("{key}: must be non-negative and finite, got {x}"));
            }
        }
        if !(t.theta_max > 0.0 && t.theta_max <= 1.0) {
            v.push(format!("tolerances.theta_max: must lie in (0, 1], got {}", t.theta_max));
        }

        match self.experiment {
            ExperimentKind::Dichotomy | ExperimentKind::Harnack => {
                let e = &self.ensemble;
                if !positive(e.rho) {
                    v.push(format!("ensemble.rho: must be positive, got {}", e.rho));
                }
                if e.n_scenarios == 0 {
                    v.push("ensemble.n_scenarios: must be at least 1".into());
                }
                if !(e.fill > 0.0 && e.fill <= 1.0) {
                    v.push(format!("ensemble.fill: must lie in (0, 1], got {}", e.fill));
                }
                let [lo, hi] = e.harnack_set;
                if !(0.0 < lo && lo < hi && hi < 1.0) {
                    v.push(format!("ensemble.harnack_set: need 0 < lo < hi < 1, got [{lo}, {hi}]"));
                }
                if let Some(q) = e.q {
                    if !(0.0..=1.0).contains(&q) {
                        v.push(format!("ensemble.q: must lie in [0, 1], got {q}"));
                    }
                }
                if let Some(eps) = e.eps {
                    if !(eps >= 0.0) {
                        v.push(format!("ensemble.eps: must be non-negative, got {eps}"));
                    }
                }
            }
            ExperimentKind::Barrier => {
                if self.barrier.eps.is_empty() || self.barrier.eps.iter().any(|&e| !(e > 0.0 && e < 1.0 + 1e-12)) {
                    v.push("barrier.eps: need a non-empty list of values in (0, 1]".into());
                }
            }
            ExperimentKind::NonControllability => {
                let n = &self.noncontrol;
                if !(0.0 < n.delta && n.delta < n.a && n.a < 1.0) {
                    v.push(format!("noncontrol: need 0 < delta < a < 1, got delta = {}, a = {}", n.delta, n.a));
                }
                let [lo, hi] = n.controls_in;
                if lo >= hi {
                    v.push(format!("noncontrol.controls_in reversed: {lo} must be below {hi}"));
                } else if !(lo >= n.a && hi <= 1.0) {
                    v.push(format!("noncontrol.controls_in: must lie in [a, 1] = [{}, 1], got [{lo}, {hi}]", n.a));
                }
                if n.amplitudes.is_empty() || n.amplitudes.iter().any(|x| !x.is_finite()) {
                    v.push("noncontrol.amplitudes: need a non-empty list of finite values".into());
                }
                if n.n_controls == 0 {
                    v.push("noncontrol.n_controls: must be at least 1".into());
                }
                if !(n.max_control >= 1.0 && n.max_control.is_finite()) {
                    v.push(format!("noncontrol.max_control: must be at least 1, got {}", n.max_control));
                }
                if !(n.target_r > 0.0) {
                    v.push(format!("noncontrol.target_r: must be positive, got {}", n.target_r));
                }
                if !(n.barrier_eps > 0.0 && n.barrier_eps < 1.0) {
                    v.push(format!("noncontrol.barrier_eps: must lie in (0, 1), got {}", n.barrier_eps));
                }
            }
            ExperimentKind::Contraction => {
                let c = &self.contraction;
                if c.n_pairs + c.n_linear == 0 {
                    v.push("contraction: need n_pairs + n_linear ≥ 1".into());
                }
                if !positive(c.max_amplitude) {
                    v.push(format!("contraction.max_amplitude: must be positive, got {}", c.max_amplitude));
                }
                if !(c.rho >= 0.0 && c.rho.is_finite()) {
                    v.push(format!("contraction.rho: must be non-negative, got {}", c.rho));
                }
            }
            ExperimentKind::Simulate | ExperimentKind::Stabilize => {}
        }
        v
    }
}

/// Command-line overrides applied on top of a scenario file before validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub experiment: Option<ExperimentKind>,
    pub seed: Option<u64>,
    pub n_cells: Option<usize>,
    pub dt: Option<f64>,
    pub out: Option<String>,
}

/// Parses and validates a scenario with no overrides.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    load_config(text, &Overrides::default())
}

/// Parses a scenario, applies `overrides`, resolves defaults and validates.
/// All violations are reported together.
pub fn load_config(text: &str, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    load_table(parse_table(text)?, overrides)
}

pub fn parse_table(text: &str) -> Result<toml::Table, ConfigError> {
    text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))
}

/// Sets a dotted `key` (e.g. `ensemble.rho`) in `table`. `value` is read as a
/// TOML value, falling back to a plain string.
pub fn assign(table: &mut toml::Table, key: &str, value: &str) -> Result<(), ConfigError> {
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError::Invalid(vec![format!("{key}: malformed key")]));
    }
    let (last, path) = parts.split_last().expect("split yields one part");
    let mut node = table;
    for p in path {
        node = node
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| ConfigError::Invalid(vec![format!("{key}: {p} is not a table")]))?;
    }
    node.insert(last.to_string(), parsed);
    Ok(())
}

/// Like [`load_config`] for an already parsed table.
pub fn load_table(mut table: toml::Table, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    if let Some(kind) = overrides.experiment {
        match table.get("experiment").and_then(|v| v.as_str()) {
            Some(given) if normalise_kind(given) != Some(kind) => {
                return Err(ConfigError::Invalid(vec![format!(
                    "experiment: scenario is \"{given}\" but the command asks for \"{kind}\""
                )]));
            }
            _ => {
                table.insert("experiment".into(), toml::Value::String(kind.as_str().into()));
            }
        }
    }
    if !table.contains_key("experiment") {
        return Err(ConfigError::Invalid(vec!["experiment: missing".into()]));
    }
    if let Some(seed) = overrides.seed {
        let seed = i64::try_from(seed).map_err(|_| ConfigError::Invalid(vec![format!("seed: {seed} is too large")]))?;
        table.insert("seed".into(), toml::Value::Integer(seed));
    }
    if let Some(n) = overrides.n_cells {
        table.insert("n_cells".into(), toml::Value::Integer(n as i64));
    }
    if let Some(dt) = overrides.dt {
        table.insert("dt".into(), toml::Value::Float(dt));
    }
    let mut config: ScenarioConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
    if let Some(dir) = &overrides.out {
        config.output.dir = Some(dir.clone());
    }
    config.resolve();
    let violations = config.violations();
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Invalid(violations))
    }
}

fn normalise_kind(s: &str) -> Option<ExperimentKind> {
    serde_json::from_value(serde_json::Value::String(s.into())).ok()
}

/// Built-in scenarios, selectable with `--preset`.
pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "paper-demo" => STABILIZE_DEMO,
        "simulate-demo" => SIMULATE_DEMO,
        "dichotomy-demo" => DICHOTOMY_DEMO,
        "harnack-demo" => HARNACK_DEMO,
        "barrier-demo" => BARRIER_DEMO,
        "noncontrol-demo" => NONCONTROL_DEMO,
        "contraction-demo" => CONTRACTION_DEMO,
        _ => return None,
    })
}

pub const PRESET_NAMES: [&str; 7] = [
    "paper-demo",
    "simulate-demo",
    "dichotomy-demo",
    "harnack-demo",
    "barrier-demo",
    "noncontrol-demo",
    "contraction-demo",
];

/// Preset used when a subcommand is given neither `--config` nor `--preset`.
pub fn default_preset(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Simulate => SIMULATE_DEMO,
        ExperimentKind::Stabilize => STABILIZE_DEMO,
        ExperimentKind::Dichotomy => DICHOTOMY_DEMO,
        ExperimentKind::Harnack => HARNACK_DEMO,
        ExperimentKind::Barrier => BARRIER_DEMO,
        ExperimentKind::NonControllability => NONCONTROL_DEMO,
        ExperimentKind::Contraction => CONTRACTION_DEMO,
    }
}

const STABILIZE_DEMO: &str = r#"
experiment = "stabilize"
nu = 0.1
n_cells = 128
n_cycles = 10
control_support = [0.3, 0.7]
forcing = { kind = "sine", k = 2, amp = 0.5 }
u0 = { kind = "sine", k = 1, amp = 0.8 }
u_hat0 = { kind = "sine", k = 3, amp = -0.5 }
"#;

const SIMULATE_DEMO: &str = r#"
experiment = "simulate"
nu = 0.1
n_cells = 128
t_end = 1.0
forcing = { kind = "sine-cosine", k = 1, amp = 1.0, omega = 6.283185307179586 }
u0 = { kind = "random-fourier", seed = 7, n_modes = 4, amp = 2.0 }
"#;

const DICHOTOMY_DEMO: &str = r#"
experiment = "dichotomy"
nu = 0.1
n_cells = 128
t_end = 1.0
control_support = [0.3, 0.7]

[ensemble]
rho = 2.0
n_scenarios = 100
"#;

const HARNACK_DEMO: &str = r#"
experiment = "harnack"
nu = 0.1
n_cells = 128
t_end = 1.0

[ensemble]
rho = 2.0
n_scenarios = 100
harnack_set = [0.25, 0.75]
"#;

const BARRIER_DEMO: &str = r#"
experiment = "barrier"
nu = 0.1
n_cells = 128
t_end = 1.0
forcing = { kind = "sine", k = 1, amp = 1.0 }
u0 = { kind = "sine", k = 1, amp = 100.0 }

[barrier]
eps = [1.0, 0.1, 0.01]
"#;

const NONCONTROL_DEMO: &str = r#"
experiment = "non-controllability"
nu = 0.1
n_cells = 128
t_end = 1.0

[noncontrol]
delta = 0.25
a = 0.5
amplitudes = [1.0, 10.0, 100.0, 1000.0]
n_controls = 10
controls_in = [0.5, 0.8]
max_control = 1000.0
target_r = 10.0
"#;

const CONTRACTION_DEMO: &str = r#"
experiment = "contraction"
nu = 0.1
n_cells = 128
t_end = 1.0
forcing = { kind = "sine", k = 2, amp = 0.5 }

[contraction]
n_pairs = 20
max_amplitude = 10.0
n_linear = 20
rho = 2.0
"#;
