//! The six experiment kinds, their configuration keys and CSV layouts.

mod norms;
mod spde;

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};
use serde::Serialize;
use serde_json::{Map, Value};

pub use norms::{Isometry, Moments, NormIdentity};
pub use spde::{SpdeBoundary, SpdeDistributed, ThresholdSweep};

/// Documentation record for one experiment kind.
#[derive(Debug, Clone, Copy)]
pub struct KindSpec {
    pub kind: ExperimentKind,
    pub summary: &'static str,
    pub required: &'static [&'static str],
    pub optional: &'static [&'static str],
    /// (file stem, columns) of every CSV the kind writes.
    pub tables: &'static [(&'static str, &'static [&'static str])],
}

pub const KINDS: [KindSpec; 6] = [
    KindSpec {
        kind: ExperimentKind::NormIdentity,
        summary: "D^H norm via K* against the Fourier Sobolev norm of order 1/2-H on random step functions",
        required: &["hurst", "n_functions", "seed"],
        optional: &["sigma", "cells", "anchor_t", "tol", "anchor_tol"],
        tables: &[
            ("norm_identity", &["H", "f_id", "dh_norm", "fourier_norm", "ratio", "constant", "pass"]),
            ("anchors", &["H", "t", "dh_norm", "exact", "rel_err", "pass"]),
        ],
    },
    KindSpec {
        kind: ExperimentKind::Isometry,
        summary: "Monte Carlo second moment of Wiener integrals against the squared D^H norm",
        required: &["drivers", "n_functions", "paths", "seed"],
        optional: &["steps", "sigma", "z_max", "min_pass_fraction"],
        tables: &[(
            "isometry",
            &["family", "H", "f_id", "mc_var", "mc_se", "dh_norm_sq", "z_score", "pass"],
        )],
    },
    KindSpec {
        kind: ExperimentKind::Moments,
        summary: "L4/L2 moment ratios on the first two Wiener chaoses",
        required: &["samples", "seed"],
        optional: &["cells", "draws", "dim", "tol_gaussian", "tol_chaos2"],
        tables: &[("moments", &["case", "order", "ratio", "reference", "rel_err", "pass"])],
    },
    KindSpec {
        kind: ExperimentKind::SpdeDistributed,
        summary: "Spectral mild solutions: existence, semigroup smoothing, Hoelder exponent and mode-one variance",
        required: &["cases", "modes", "paths", "seed"],
        optional: &[
            "smoothing_modes",
            "length",
            "p",
            "steps",
            "dt_factor",
            "t0",
            "sigma",
            "shift",
            "tol",
            "z_max",
            "margin",
        ],
        tables: &[(
            "spde_distributed",
            &[
                "m",
                "H",
                "alpha",
                "modes",
                "gamma_norm",
                "decay_exponent",
                "finite",
                "expected_finite",
                "smoothing_slope",
                "smoothing_expected",
                "holder_slope",
                "holder_bound",
                "mode1_var",
                "mode1_se",
                "mode1_exact",
                "mode1_z",
                "pass",
            ],
        )],
    },
    KindSpec {
        kind: ExperimentKind::SpdeBoundary,
        summary: "Neumann boundary-noise integral, its refinement trace and the d-dimensional surrogate",
        required: &["cases", "t0"],
        optional: &[
            "length",
            "tol",
            "image_terms",
            "surrogate_cases",
            "surrogate_d",
            "surrogate_c",
            "paths",
            "steps",
            "n_x",
            "seed",
            "z_max",
        ],
        tables: &[
            (
                "spde_boundary",
                &["kernel", "H", "p", "d", "value", "last_change", "diverged", "expected_diverged", "pass"],
            ),
            ("boundary_profile", &["H", "p", "x", "mc_var", "mc_se", "predicted", "z_score", "pass"]),
        ],
    },
    KindSpec {
        kind: ExperimentKind::ThresholdSweep,
        summary: "Existence verdict of the stochastic convolution across alpha around H - 1/(4m)",
        required: &["hurst", "alpha"],
        optional: &["m", "modes", "length", "p", "t0", "sigma", "margin"],
        tables: &[(
            "threshold_sweep",
            &["H", "alpha", "threshold", "decay_exponent", "finite", "expected_finite", "pass"],
        )],
    },
];

pub fn spec(kind: ExperimentKind) -> &'static KindSpec {
    KINDS.iter().find(|s| s.kind == kind).expect("every kind is documented")
}

/// Three lines per kind: name and summary, required keys, optional keys.
pub fn list_experiments() -> String {
    let mut out = String::new();
    for s in &KINDS {
        out.push_str(&format!("{:<18}{}\n", s.kind.name(), s.summary));
        out.push_str(&format!("{:<18}required: {}\n", "", s.required.join(", ")));
        out.push_str(&format!("{:<18}optional: {}\n", "", s.optional.join(", ")));
    }
    out
}

/// CSV column reference for `--help` and the README.
pub fn column_reference() -> String {
    let mut out = String::new();
    for s in &KINDS {
        for (stem, cols) in s.tables {
            out.push_str(&format!("{} -> {stem}.csv: {}\n", s.kind.name(), cols.join(",")));
        }
    }
    out
}

/// One CSV worth of rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(kind: ExperimentKind, index: usize) -> Self {
        let (name, header) = spec(kind).tables[index];
        Self {
            name,
            header,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub case: String,
    pub pass: bool,
    pub detail: String,
}

/// Everything an experiment produces.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    /// Per-case results recorded in the manifest.
    pub verdicts: Vec<Verdict>,
    /// The in-config assertions; the run passes iff all of them do.
    pub assertions: Vec<Verdict>,
    pub metrics: Map<String, Value>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    fn assert(&mut self, case: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.assertions.push(Verdict {
            case: case.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn verdict(&mut self, case: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict {
            case: case.into(),
            pass,
            detail: detail.into(),
        });
    }
}

/// A validated experiment ready to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    NormIdentity(NormIdentity),
    Isometry(Isometry),
    Moments(Moments),
    SpdeDistributed(SpdeDistributed),
    SpdeBoundary(SpdeBoundary),
    ThresholdSweep(ThresholdSweep),
}

impl Experiment {
    /// Reads the kind-specific keys and rejects anything left over.
    pub fn from_config(mut cfg: ExperimentConfig) -> Result<Self, ConfigError> {
        let exp = match cfg.kind {
            ExperimentKind::NormIdentity => Self::NormIdentity(NormIdentity::parse(&mut cfg)),
            ExperimentKind::Isometry => Self::Isometry(Isometry::parse(&mut cfg)),
            ExperimentKind::Moments => Self::Moments(Moments::parse(&mut cfg)),
            ExperimentKind::SpdeDistributed => Self::SpdeDistributed(SpdeDistributed::parse(&mut cfg)),
            ExperimentKind::SpdeBoundary => Self::SpdeBoundary(SpdeBoundary::parse(&mut cfg)),
            ExperimentKind::ThresholdSweep => Self::ThresholdSweep(ThresholdSweep::parse(&mut cfg)),
        };
        cfg.finish()?;
        Ok(exp)
    }

    pub fn kind(&self) -> ExperimentKind {
        match self {
            Self::NormIdentity(_) => ExperimentKind::NormIdentity,
            Self::Isometry(_) => ExperimentKind::Isometry,
            Self::Moments(_) => ExperimentKind::Moments,
            Self::SpdeDistributed(_) => ExperimentKind::SpdeDistributed,
            Self::SpdeBoundary(_) => ExperimentKind::SpdeBoundary,
            Self::ThresholdSweep(_) => ExperimentKind::ThresholdSweep,
        }
    }

    pub fn run(&self) -> Outcome {
        match self {
            Self::NormIdentity(e) => e.run(),
            Self::Isometry(e) => e.run(),
            Self::Moments(e) => e.run(),
            Self::SpdeDistributed(e) => e.run(),
            Self::SpdeBoundary(e) => e.run(),
            Self::ThresholdSweep(e) => e.run(),
        }
    }
}

/// Shortest round-trip decimal; the same bits always print the same way.
fn num(x: f64) -> String {
    format!("{x}")
}

fn flag(b: bool) -> String {
    b.to_string()
}

/// Rejects values outside (lo, hi) exclusive.
fn check_open(cfg: &mut ExperimentConfig, key: &str, values: &[f64], lo: f64, hi: f64) {
    for v in values {
        if !(*v > lo && *v < hi) {
            cfg.reject(key, format!("{v} is outside ({lo}, {hi})"));
        }
    }
}

fn check_positive(cfg: &mut ExperimentConfig, key: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        cfg.reject(key, format!("{v} must be positive"));
    }
}

fn check_count(cfg: &mut ExperimentConfig, key: &str, v: usize, min: usize) {
    if v < min {
        cfg.reject(key, format!("{v} is below the minimum {min}"));
    }
}
