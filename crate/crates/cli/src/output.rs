//! CSV tables, JSON summary and optional gnuplot scripts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use alphamod::report::{ExperimentReport, Table};
use serde::Serialize;

use crate::config::{Command, RunConfig};

#[derive(Debug, Clone, Serialize)]
pub struct Summary<'a> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub metrics: &'a BTreeMap<String, f64>,
    pub targets: &'a BTreeMap<String, f64>,
    pub tolerances: &'a BTreeMap<String, f64>,
    pub checks: &'a BTreeMap<String, bool>,
    pub notes: &'a [String],
    pub tables: Vec<String>,
    pub pass: bool,
}

pub fn write_all(
    dir: &Path,
    prefix: &str,
    command: Command,
    config: &RunConfig,
    report: &ExperimentReport,
    gnuplot: bool,
) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for table in &report.tables {
        let csv = dir.join(format!("{prefix}_{}.csv", table.name));
        fs::write(&csv, table.to_csv())?;
        if gnuplot {
            let gp = dir.join(format!("{prefix}_{}.gp", table.name));
            fs::write(&gp, gnuplot_script(table, &csv))?;
            files.push(gp);
        }
        files.push(csv);
    }
    let summary = Summary {
        command: command.name(),
        config,
        metrics: &report.metrics,
        targets: &report.targets,
        tolerances: &report.tolerances,
        checks: &report.checks,
        notes: &report.notes,
        tables: files.iter().filter_map(|f| f.file_name()).map(|f| f.to_string_lossy().into_owned()).collect(),
        pass: report.pass(),
    };
    let json = dir.join(format!("{prefix}_summary.json"));
    let mut text = serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(&json, text)?;
    files.push(json);
    Ok(files)
}

/// Every column against the first; log axes when the plotted data are positive.
fn gnuplot_script(table: &Table, csv: &Path) -> String {
    let file = csv.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let positive = |i: usize| table.rows.iter().all(|r| r[i] > 0.0 && r[i].is_finite());
    let mut out = String::new();
    out.push_str("set datafile separator ','\nset key autotitle columnhead\n");
    out.push_str(&format!("set title '{}'\nset xlabel '{}'\n", table.name, table.columns[0]));
    if !table.rows.is_empty() && positive(0) && (1..table.columns.len()).all(positive) {
        out.push_str("set logscale xy\n");
    }
    let curves: Vec<String> =
        (2..=table.columns.len()).map(|c| format!("'{file}' using 1:{c} with linespoints")).collect();
    if curves.is_empty() {
        out.push_str(&format!("plot '{file}' using 0:1 with linespoints\n"));
    } else {
        out.push_str(&format!("plot {}\n", curves.join(", \\\n     ")));
    }
    out
}
