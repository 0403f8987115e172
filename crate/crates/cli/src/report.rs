use crate::config::ScenarioConfig;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
}

impl Relation {
    fn holds(self, value: f64, limit: f64) -> bool {
        match self {
            Relation::Lt => value < limit,
            Relation::Le => value <= limit,
            Relation::Gt => value > limit,
            Relation::Ge => value >= limit,
            Relation::Eq => value == limit,
        }
    }
}

/// One pass/fail check: `value <relation> limit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
    pub relation: Relation,
}

impl Verdict {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: relation.holds(value, limit),
            value,
            limit,
            relation,
        }
    }

    /// A boolean check, encoded as `value == 1`.
    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Relation::Eq, 1.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub version: String,
    pub config: ScenarioConfig,
    pub passed: bool,
    pub verdicts: Vec<Verdict>,
    pub constants: BTreeMap<String, f64>,
    pub details: serde_json::Value,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(config: ScenarioConfig, verdicts: Vec<Verdict>, constants: BTreeMap<String, f64>, details: serde_json::Value) -> Self {
        Self {
            experiment: config.experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            passed: verdicts.iter().all(|v| v.passed),
            config,
            verdicts,
            constants,
            details,
            wall_time_s: 0.0,
        }
    }

    /// Pretty JSON. Non-finite numbers become `null`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// One line per verdict, for the terminal.
    pub fn summary(&self) -> String {
        let mut s = format!("{}: {}\n", self.experiment, if self.passed { "PASS" } else { "FAIL" });
        for v in &self.verdicts {
            let rel = serde_json::to_value(v.relation).ok().and_then(|r| r.as_str().map(String::from)).unwrap_or_default();
            s.push_str(&format!(
                "  [{}] {} = {:.6e} {rel} {:.6e}\n",
                if v.passed { "ok" } else { "FAIL" },
                v.name,
                v.value,
                v.limit
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Verdict::new("a", 0.5, Relation::Lt, 1.0).passed);
        assert!(!Verdict::new("a", 1.0, Relation::Lt, 1.0).passed);
        assert!(Verdict::new("a", 1.0, Relation::Le, 1.0).passed);
        assert!(!Verdict::new("a", f64::NAN, Relation::Le, 1.0).passed);
        assert!(Verdict::flag("f", true).passed && !Verdict::flag("f", false).passed);
        assert_eq!(serde_json::to_string(&Relation::Ge).unwrap(), "\">=\"");
    }
}
