//! Configuration-driven experiment runner on top of `fracwiener`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;

use config::{ConfigError, ExperimentConfig};
use experiments::{Experiment, Outcome};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

pub const DEFAULT_OUTPUT: &str = "fracwiener-out";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the `output` key of the configuration.
    pub out: Option<PathBuf>,
    /// Treat warnings as failures.
    pub strict: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write results to {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Io { .. } => 1,
        }
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub outcome: Outcome,
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub strict: bool,
}

impl RunReport {
    pub fn pass(&self) -> bool {
        self.outcome.pass() && !(self.strict && !self.outcome.warnings.is_empty())
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    /// Human-readable failures and warnings, empty on a clean pass.
    pub fn failure_table(&self) -> String {
        let mut out = String::new();
        let failed: Vec<_> = self.outcome.assertions.iter().filter(|a| !a.pass).collect();
        if !failed.is_empty() {
            let width = failed.iter().map(|a| a.case.len()).max().unwrap_or(0);
            out.push_str("FAILED\n");
            for a in failed {
                out.push_str(&format!("  {:<width$}  {}\n", a.case, a.detail));
            }
        }
        for w in &self.outcome.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

/// Parses and validates a configuration file without running it.
pub fn load(config_path: &Path) -> Result<(ExperimentConfig, Experiment), ConfigError> {
    let cfg = ExperimentConfig::from_path(config_path)?;
    let exp = Experiment::from_config(cfg.clone())?;
    Ok((cfg, exp))
}

/// Loads, runs and writes one experiment.
pub fn run(config_path: &Path, opts: &RunOptions) -> Result<RunReport, RunError> {
    let (cfg, exp) = load(config_path)?;
    let started = SystemTime::now();
    let outcome = exp.run();
    let dir = opts
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let info = output::RunInfo {
        kind: cfg.kind.name(),
        name: cfg.name.as_deref(),
        config_hash: &cfg.hash(),
        started,
        threads: rayon::current_num_threads(),
    };
    let files = output::write_all(&dir, &outcome, &info).map_err(|source| RunError::Io {
        path: dir.clone(),
        source,
    })?;
    Ok(RunReport {
        outcome,
        output_dir: dir,
        files,
        strict: opts.strict,
    })
}
