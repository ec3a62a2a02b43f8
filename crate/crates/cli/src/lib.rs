//! Experiment runner: JSON configuration in, CSV tables and a JSON summary out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use alphamod::report::ExperimentReport;
use thiserror::Error;

pub use config::{Command, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Schema(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Schema(_) => 2,
            Self::Internal(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    /// Worker threads for sweep parallelism; the rayon default when `None`.
    pub jobs: Option<usize>,
    /// Overrides `output.dir`.
    pub out: Option<PathBuf>,
    pub emit_gnuplot: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub report: ExperimentReport,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn pass(&self) -> bool {
        self.report.pass()
    }

    /// 0 on pass, 1 when a check failed.
    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }
}

/// Parse, validate and run; `text` is the JSON configuration (defaults when `None`).
pub fn run_text(command: Command, text: Option<&str>, opts: &Options) -> Result<RunOutcome, CliError> {
    let cfg = match text {
        Some(t) => RunConfig::parse(t)?,
        None => RunConfig::default(),
    };
    run(command, cfg, opts)
}

pub fn run(command: Command, mut cfg: RunConfig, opts: &Options) -> Result<RunOutcome, CliError> {
    cfg.validate(command)?;
    cfg.command = Some(command);
    if let Some(out) = &opts.out {
        cfg.output.dir = out.to_string_lossy().into_owned();
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Internal(e.to_string()))?;
    let report = pool.install(|| commands::run(command, &cfg)).map_err(|e| CliError::Internal(e.to_string()))?;
    let prefix = cfg.output.prefix.clone().unwrap_or_else(|| command.name().to_string());
    let files =
        output::write_all(std::path::Path::new(&cfg.output.dir), &prefix, command, &cfg, &report, opts.emit_gnuplot)
            .map_err(|e| CliError::Internal(format!("writing outputs: {e}")))?;
    Ok(RunOutcome { config: cfg, report, files })
}
