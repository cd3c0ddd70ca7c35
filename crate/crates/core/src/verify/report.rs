use std::collections::BTreeMap;

use serde::Serialize;

/// One refinement level of a limit-type check.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub level: String,
    pub value: f64,
    pub deviation: f64,
}

/// Machine-readable verdict of a single check, tied to the statement it
/// verifies. The pass flag is a pure function of `quantities` and
/// `tolerance`; quantities are keyed deterministically.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub statement: String,
    pub instance: String,
    pub quantities: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub convergence: Vec<ConvergenceRow>,
}

impl CheckReport {
    pub fn new(statement: &str, instance: &str, tolerance: f64) -> CheckReport {
        CheckReport {
            statement: statement.to_string(),
            instance: instance.to_string(),
            quantities: BTreeMap::new(),
            tolerance,
            pass: false,
            convergence: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: f64) -> &mut Self {
        self.quantities.insert(key.to_string(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.quantities.get(key).copied()
    }

    pub fn push_level(&mut self, level: String, value: f64, deviation: f64) {
        self.convergence.push(ConvergenceRow {
            level,
            value,
            deviation,
        });
    }
}
