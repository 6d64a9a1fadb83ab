use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::frequency::Frequency;

/// Outcome of an exact check. A failing report always carries a
/// counterexample pair; its meaning is check-specific and spelled out in
/// `details`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    check_name: String,
    parameters: BTreeMap<String, i64>,
    pass: bool,
    counterexample: Option<(i64, i64)>,
    details: String,
}

impl CheckReport {
    pub fn passed(name: &str, parameters: &[(&str, i64)], details: impl Into<String>) -> Self {
        Self {
            check_name: name.to_string(),
            parameters: collect(parameters),
            pass: true,
            counterexample: None,
            details: details.into(),
        }
    }

    pub fn failed(
        name: &str,
        parameters: &[(&str, i64)],
        counterexample: (Frequency, Frequency),
        details: impl Into<String>,
    ) -> Self {
        Self {
            check_name: name.to_string(),
            parameters: collect(parameters),
            pass: false,
            counterexample: Some((counterexample.0.get(), counterexample.1.get())),
            details: details.into(),
        }
    }

    pub fn check_name(&self) -> &str {
        &self.check_name
    }

    pub fn parameters(&self) -> &BTreeMap<String, i64> {
        &self.parameters
    }

    pub fn pass(&self) -> bool {
        self.pass
    }

    pub fn counterexample(&self) -> Option<(i64, i64)> {
        self.counterexample
    }

    pub fn details(&self) -> &str {
        &self.details
    }
}

fn collect(parameters: &[(&str, i64)]) -> BTreeMap<String, i64> {
    parameters
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect()
}

/// One line: `PASS name k=v ...` or `FAIL name k=v ... counterexample=(a, b): details`.
impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check_name
        )?;
        for (k, v) in &self.parameters {
            write!(f, " {k}={v}")?;
        }
        if let Some((a, b)) = self.counterexample {
            write!(f, " counterexample=({a}, {b}): {}", self.details)?;
        }
        Ok(())
    }
}
