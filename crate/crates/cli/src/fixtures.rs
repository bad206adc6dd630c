//! Published-number fixtures for the metric arithmetic.
//!
//! The stock fixture holds best-single and combined accuracies taken from
//! the texture experiments and the DS1 accuracies of the thirteen subsets
//! reported for two classes. `check` recomputes the error-reduction rates
//! and the overall performance and compares them with the published values.

use std::fmt;

use dsfusion::metrics::{err, mean_accuracy};
use dsfusion::FusionError;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrFixture {
    pub name: String,
    pub best_single: f64,
    pub combined: f64,
    pub expected: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverallFixture {
    pub name: String,
    pub accuracies: Vec<f64>,
    pub expected: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSet {
    pub err: Vec<ErrFixture>,
    pub overall: Vec<OverallFixture>,
}

impl FixtureSet {
    pub fn stock() -> Self {
        Self {
            err: vec![
                ErrFixture {
                    name: "err-texture-2-classes".into(),
                    best_single: 91.14,
                    combined: 92.40,
                    expected: 14.22,
                    tolerance: 0.05,
                },
                ErrFixture {
                    name: "err-texture-9-classes".into(),
                    best_single: 83.65,
                    combined: 92.48,
                    expected: 54.0,
                    tolerance: 0.1,
                },
            ],
            overall: vec![OverallFixture {
                name: "overall-ds1-texture-2-classes".into(),
                accuracies: vec![
                    92.46, 91.62, 85.10, 92.40, 92.47, 91.68, 85.43, 92.21, 92.32, 92.25, 91.78,
                    86.66, 92.21,
                ],
                expected: 90.66,
                tolerance: 0.05,
            }],
        }
    }
}

/// Outcome of one fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureOutcome {
    pub name: String,
    /// `None` when the value could not be computed.
    pub value: Option<f64>,
    pub expected: f64,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl FixtureOutcome {
    pub fn passed(&self) -> bool {
        self.value
            .is_some_and(|v| (v - self.expected).abs() <= self.tolerance)
    }
}

impl fmt::Display for FixtureOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        match self.value {
            Some(v) => write!(
                f,
                "{status} {}: {v:.4} (expected {} ± {})",
                self.name, self.expected, self.tolerance
            )?,
            None => write!(f, "{status} {}: not computable", self.name)?,
        }
        if let Some(note) = &self.note {
            write!(f, " [{note}]")?;
        }
        Ok(())
    }
}

pub fn evaluate(set: &FixtureSet) -> Vec<FixtureOutcome> {
    let mut out = Vec::new();
    for fx in &set.err {
        let (value, note) = match err(fx.best_single, fx.combined) {
            Ok(v) => (Some(v), None),
            Err(FusionError::PerfectBaseline) => (
                None,
                Some("best single classifier is perfect; error reduction undefined".into()),
            ),
            Err(e) => (None, Some(e.to_string())),
        };
        out.push(FixtureOutcome {
            name: fx.name.clone(),
            value,
            expected: fx.expected,
            tolerance: fx.tolerance,
            note,
        });
    }
    for fx in &set.overall {
        let (value, note) = match mean_accuracy(fx.accuracies.iter().copied()) {
            Ok(v) => (Some(v), None),
            Err(e) => (None, Some(e.to_string())),
        };
        out.push(FixtureOutcome {
            name: fx.name.clone(),
            value,
            expected: fx.expected,
            tolerance: fx.tolerance,
            note,
        });
    }
    out
}

/// Evaluate and fail with `FixtureMismatch` naming every failing fixture.
pub fn check(set: &FixtureSet) -> Result<Vec<FixtureOutcome>> {
    let outcomes = evaluate(set);
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| o.to_string())
        .collect();
    if failed.is_empty() {
        Ok(outcomes)
    } else {
        Err(CliError::FixtureMismatch(failed.join("; ")))
    }
}
