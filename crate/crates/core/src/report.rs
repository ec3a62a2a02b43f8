//! Sweep results: numeric tables plus named metrics, targets and checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Comma-separated with a header row; floats as `{:.16e}` (17 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                write!(out, "{}", format_float(*v)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub tables: Vec<Table>,
    pub metrics: BTreeMap<String, f64>,
    pub targets: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), ..Default::default() }
    }

    pub fn metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), value);
    }

    pub fn target(&mut self, key: &str, value: f64, tolerance: f64) {
        self.targets.insert(key.to_string(), value);
        self.tolerances.insert(key.to_string(), tolerance);
    }

    pub fn check(&mut self, key: &str, ok: bool) {
        self.checks.insert(key.to_string(), ok);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn pass(&self) -> bool {
        self.checks.values().all(|c| *c)
    }

    /// Fold another report in under a key prefix.
    pub fn absorb(&mut self, prefix: &str, other: ExperimentReport) {
        for mut t in other.tables {
            t.name = format!("{prefix}_{}", t.name);
            self.tables.push(t);
        }
        let key = |k: String| format!("{prefix}.{k}");
        self.metrics.extend(other.metrics.into_iter().map(|(k, v)| (key(k), v)));
        self.targets.extend(other.targets.into_iter().map(|(k, v)| (key(k), v)));
        self.tolerances.extend(other.tolerances.into_iter().map(|(k, v)| (key(k), v)));
        self.checks.extend(other.checks.into_iter().map(|(k, v)| (key(k), v)));
        self.notes.extend(other.notes.into_iter().map(|n| format!("{prefix}: {n}")));
    }
}
