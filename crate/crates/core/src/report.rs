//! Check entries and aggregated reports shared by every verification routine.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One verified relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Human-readable name of the relation being checked.
    pub relation: String,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    /// Where the worst violation occurred, e.g. `x=3,y=7`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

impl Check {
    /// Passes iff `residual <= tolerance` (NaN fails).
    pub fn within(
        name: impl Into<String>,
        relation: impl Into<String>,
        residual: f64,
        tolerance: f64,
        location: Option<String>,
    ) -> Self {
        Self {
            name: name.into(),
            relation: relation.into(),
            pass: residual <= tolerance,
            residual,
            tolerance,
            location,
        }
    }

    /// A boolean outcome without a meaningful residual.
    pub fn flag(name: impl Into<String>, relation: impl Into<String>, pass: bool, location: Option<String>) -> Self {
        Self {
            name: name.into(),
            relation: relation.into(),
            pass,
            residual: if pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            location,
        }
    }
}

/// Tracks the maximum residual and where it occurred.
#[derive(Clone, Debug, Default)]
pub(crate) struct Worst {
    pub value: f64,
    pub location: Option<String>,
}

impl Worst {
    pub fn update(&mut self, value: f64, location: impl FnOnce() -> String) {
        // NaN must win so that broken input never reports success.
        if (value.is_nan() || value > self.value || self.location.is_none()) && !self.value.is_nan() {
            self.value = value;
            self.location = Some(location());
        }
    }

    pub fn into_check(self, name: &str, relation: &str, tolerance: f64) -> Check {
        Check::within(name, relation, self.value, tolerance, self.location)
    }
}

/// A command's full verification output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub entries: Vec<Check>,
    pub pass: bool,
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, serde_json::Value>,
}

impl Report {
    pub fn new(command: Vec<String>, entries: Vec<Check>) -> Self {
        let pass = entries.iter().all(|c| c.pass);
        Self {
            command,
            entries,
            pass,
            wall_time_s: 0.0,
            details: BTreeMap::new(),
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.entries.iter().filter(|c| !c.pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_residual_fails() {
        assert!(!Check::within("x", "r", f64::NAN, 1.0, None).pass);
        let mut w = Worst::default();
        w.update(0.5, || "a".into());
        w.update(f64::NAN, || "b".into());
        w.update(0.9, || "c".into());
        assert!(w.value.is_nan());
        assert_eq!(w.location.as_deref(), Some("b"));
    }

    #[test]
    fn overall_pass_requires_every_entry() {
        let r = Report::new(
            vec![],
            vec![Check::within("a", "r", 0.0, 1e-9, None), Check::flag("b", "r", false, None)],
        );
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
    }
}
