use super::{check_count, check_open, check_positive, flag, num, Outcome, Table};
use crate::config::{ExperimentConfig, ExperimentKind, Pair};
use fracwiener::chaos_core::{
    double_wiener_integral, moment_ratio, wiener_integral_first, ChaosSample, DiscreteIsonormal, SymmetricKernel,
};
use fracwiener::frac_process::simulate_scalar;
use fracwiener::rng::{derive_seed, substream};
use fracwiener::sobolev::{c_sigma_h_constant, dh_norm_kstar, sobolev_norm_fourier, GridFunction};
use fracwiener::wiener_integral::{elementary_integral, isometry_report};
use fracwiener::{FracParams, SobolevOrder, StepFunction, TimeGrid};
use rand::Rng;
use serde_json::json;

const FUNCTIONS: u64 = 1;
const PATHS: u64 = 2;
const COEFFICIENTS: u64 = 3;

/// Piecewise constant function on `cells` cells of [0, 1) with runs of
/// random length; function `id` of the family keyed by `seed`.
fn random_grid_function(seed: u64, id: u64, cells: usize) -> GridFunction {
    let mut rng = substream(derive_seed(seed, FUNCTIONS), id);
    let grid = TimeGrid::unit(1.0, cells).expect("cells ≥ 1");
    let mut vals = Vec::with_capacity(cells);
    while vals.len() < cells {
        let run = rng.random_range(1..=(cells / 4).max(1)).min(cells - vals.len());
        let v: f64 = rng.random_range(-2.0..2.0);
        vals.extend(std::iter::repeat_n(v, run));
    }
    GridFunction::new(grid, vals).expect("length matches grid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormIdentity {
    pub hurst: Vec<f64>,
    pub n_functions: usize,
    pub seed: u64,
    pub sigma: f64,
    pub cells: usize,
    pub anchor_t: Vec<f64>,
    pub tol: f64,
    pub anchor_tol: f64,
}

impl NormIdentity {
    pub(super) fn parse(cfg: &mut ExperimentConfig) -> Self {
        let e = Self {
            hurst: cfg.list("hurst"),
            n_functions: cfg.required("n_functions").unwrap_or_default(),
            seed: cfg.required("seed").unwrap_or_default(),
            sigma: cfg.optional("sigma", 1.0),
            cells: cfg.optional("cells", 48),
            anchor_t: cfg.optional_list("anchor_t", vec![0.5, 1.0, 2.0]),
            tol: cfg.optional("tol", 0.01),
            anchor_tol: cfg.optional("anchor_tol", 1e-4),
        };
        check_open(cfg, "hurst", &e.hurst, 0.0, 1.0);
        check_count(cfg, "n_functions", e.n_functions, 1);
        check_count(cfg, "cells", e.cells, 4);
        check_positive(cfg, "sigma", e.sigma);
        for t in &e.anchor_t {
            check_positive(cfg, "anchor_t", *t);
        }
        e
    }

    pub fn run(&self) -> Outcome {
        let mut out = Outcome::default();
        let mut table = Table::new(ExperimentKind::NormIdentity, 0);
        let mut anchors = Table::new(ExperimentKind::NormIdentity, 1);
        let mut worst: f64 = 0.0;
        for &h in &self.hurst {
            let params = FracParams::fbm(h, self.sigma).expect("validated");
            let constant = c_sigma_h_constant(self.sigma, h).expect("validated");
            let s = SobolevOrder::from_hurst(h).expect("validated");
            for id in 0..self.n_functions as u64 {
                let g = random_grid_function(self.seed, id, self.cells);
                let dh = dh_norm_kstar(&g.to_step_function(), &params);
                let fourier = sobolev_norm_fourier(&g, s);
                let ratio = dh / fourier;
                let err = (ratio / constant - 1.0).abs();
                worst = worst.max(err);
                let pass = err <= self.tol;
                table.push(vec![num(h), id.to_string(), num(dh), num(fourier), num(ratio), num(constant), flag(pass)]);
                out.verdict(format!("H={h} f={id}"), pass, format!("ratio/C - 1 = {:.3e}", ratio / constant - 1.0));
            }
            for &t in &self.anchor_t {
                let f = StepFunction::indicator(0.0, t).expect("t > 0");
                let v = dh_norm_kstar(&f, &params);
                let exact = self.sigma * t.powf(h);
                let rel = (v - exact).abs() / exact;
                let pass = rel <= self.anchor_tol;
                anchors.push(vec![num(h), num(t), num(v), num(exact), num(rel), flag(pass)]);
                out.assert(format!("anchor H={h} t={t}"), pass, format!("relative error {rel:.3e}"));
            }
        }
        let bad: Vec<String> = out
            .verdicts
            .iter()
            .filter(|v| !v.pass)
            .map(|v| v.case.clone())
            .collect();
        out.assert(
            "norm identity",
            bad.is_empty(),
            format!("worst |ratio/C - 1| = {worst:.3e}; failing: [{}]", bad.join(", ")),
        );
        out.metrics.insert("worst_relative_deviation".into(), json!(worst));
        out.tables = vec![table, anchors];
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Driver {
    Fbm,
    Rosenblatt,
}

impl std::str::FromStr for Driver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fbm" => Ok(Self::Fbm),
            "rosenblatt" => Ok(Self::Rosenblatt),
            _ => Err(format!("unknown driver '{s}' (expected fbm or rosenblatt)")),
        }
    }
}

impl Driver {
    fn name(self) -> &'static str {
        match self {
            Self::Fbm => "fbm",
            Self::Rosenblatt => "rosenblatt",
        }
    }

    fn params(self, h: f64, sigma: f64) -> fracwiener::Result<FracParams> {
        match self {
            Self::Fbm => FracParams::fbm(h, sigma),
            Self::Rosenblatt => FracParams::rosenblatt(h, sigma),
        }
    }
}

/// Step function with breakpoints on the nodes of `grid`; function `id` of
/// the family keyed by `seed`.
fn random_node_step(seed: u64, id: u64, grid: &TimeGrid) -> StepFunction {
    let mut rng = substream(derive_seed(seed, FUNCTIONS), id);
    let n = grid.n_steps();
    let mut idx: Vec<usize> = (0..rng.random_range(2..=6)).map(|_| rng.random_range(0..=n)).collect();
    idx.sort_unstable();
    idx.dedup();
    if idx.len() < 2 {
        idx = vec![0, n];
    }
    let bp = idx.iter().map(|&i| grid.node(i)).collect();
    let vals = (1..idx.len()).map(|_| rng.random_range(-2.0..2.0)).collect();
    StepFunction::new(bp, vals).expect("sorted distinct nodes")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    pub drivers: Vec<(Driver, f64)>,
    pub n_functions: usize,
    pub paths: usize,
    pub seed: u64,
    pub steps: usize,
    pub sigma: f64,
    pub z_max: f64,
    pub min_pass_fraction: f64,
}

impl Isometry {
    pub(super) fn parse(cfg: &mut ExperimentConfig) -> Self {
        let drivers: Vec<Pair<Driver, f64>> = cfg.list("drivers");
        let e = Self {
            drivers: drivers.into_iter().map(|Pair(d, h)| (d, h)).collect(),
            n_functions: cfg.required("n_functions").unwrap_or_default(),
            paths: cfg.required("paths").unwrap_or_default(),
            seed: cfg.required("seed").unwrap_or_default(),
            steps: cfg.optional("steps", 32),
            sigma: cfg.optional("sigma", 1.0),
            z_max: cfg.optional("z_max", 3.0),
            min_pass_fraction: cfg.optional("min_pass_fraction", 0.95),
        };
        for (d, h) in &e.drivers {
            if let Err(err) = d.params(*h, 1.0) {
                cfg.reject("drivers", format!("{}:{h}: {err}", d.name()));
            }
        }
        check_count(cfg, "n_functions", e.n_functions, 1);
        check_count(cfg, "paths", e.paths, 2);
        check_count(cfg, "steps", e.steps, 1);
        check_positive(cfg, "sigma", e.sigma);
        check_positive(cfg, "z_max", e.z_max);
        if !(0.0..=1.0).contains(&e.min_pass_fraction) {
            cfg.reject("min_pass_fraction", "must lie in [0, 1]");
        }
        e
    }

    pub fn run(&self) -> Outcome {
        let mut out = Outcome::default();
        let mut table = Table::new(ExperimentKind::Isometry, 0);
        let grid = TimeGrid::unit(1.0, self.steps).expect("validated");
        if self.paths < 1000 {
            out.warnings.push(format!(
                "{} paths: standard errors of the second moment are unreliable",
                self.paths
            ));
        }
        let mut z_scores = Vec::new();
        for (i, &(driver, h)) in self.drivers.iter().enumerate() {
            let params = driver.params(h, self.sigma).expect("validated");
            let seed = derive_seed(derive_seed(self.seed, PATHS), i as u64);
            let ens = match simulate_scalar(&params, grid, self.paths, seed) {
                Ok(ens) => ens,
                Err(e) => {
                    out.assert(format!("{}:{h}", driver.name()), false, format!("simulation failed: {e}"));
                    continue;
                }
            };
            for id in 0..self.n_functions as u64 {
                let f = random_node_step(self.seed, id, &grid);
                let rep = isometry_report(&f, &ens).expect("breakpoints are grid nodes");
                let res = elementary_integral(&f, &ens).expect("breakpoints are grid nodes");
                if !res.snapped.is_empty() {
                    out.warnings.push(format!("f={id}: snapped breakpoints {:?}", res.snapped));
                }
                let pass = rep.z_score.abs() <= self.z_max;
                z_scores.push(rep.z_score);
                table.push(vec![
                    driver.name().to_string(),
                    num(h),
                    id.to_string(),
                    num(rep.mc_var),
                    num(rep.mc_se),
                    num(rep.dh_norm_sq),
                    num(rep.z_score),
                    flag(pass),
                ]);
                out.verdict(format!("{}:{h} f={id}", driver.name()), pass, format!("z = {:.3}", rep.z_score));
            }
        }
        let n_pass = out.verdicts.iter().filter(|v| v.pass).count();
        let fraction = n_pass as f64 / out.verdicts.len().max(1) as f64;
        out.assert(
            "isometry pass fraction",
            fraction >= self.min_pass_fraction,
            format!(
                "{n_pass}/{} cells with |z| <= {} (need {})",
                out.verdicts.len(),
                self.z_max,
                self.min_pass_fraction
            ),
        );
        out.metrics.insert("z_scores".into(), json!(z_scores));
        out.metrics.insert("pass_fraction".into(), json!(fraction));
        out.tables = vec![table];
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub samples: usize,
    pub seed: u64,
    pub cells: usize,
    pub draws: usize,
    pub dim: usize,
    pub tol_gaussian: f64,
    pub tol_chaos2: f64,
}

impl Moments {
    pub(super) fn parse(cfg: &mut ExperimentConfig) -> Self {
        let e = Self {
            samples: cfg.required("samples").unwrap_or_default(),
            seed: cfg.required("seed").unwrap_or_default(),
            cells: cfg.optional("cells", 16),
            draws: cfg.optional("draws", 100),
            dim: cfg.optional("dim", 3),
            tol_gaussian: cfg.optional("tol_gaussian", 0.01),
            tol_chaos2: cfg.optional("tol_chaos2", 0.02),
        };
        check_count(cfg, "samples", e.samples, 2);
        check_count(cfg, "cells", e.cells, 2);
        check_count(cfg, "draws", e.draws, 1);
        check_count(cfg, "dim", e.dim, 1);
        check_positive(cfg, "tol_gaussian", e.tol_gaussian);
        check_positive(cfg, "tol_chaos2", e.tol_chaos2);
        e
    }

    pub fn run(&self) -> Outcome {
        let mut out = Outcome::default();
        let mut table = Table::new(ExperimentKind::Moments, 0);
        let grid = TimeGrid::unit(1.0, self.cells).expect("validated");
        let dt = grid.dt();
        let iso = DiscreteIsonormal::new(grid, derive_seed(self.seed, PATHS));
        let mut row = |out: &mut Outcome, case: &str, order: u32, ratio: f64, reference: f64, pass: bool| {
            let rel = ratio / reference - 1.0;
            table.push(vec![case.into(), order.to_string(), num(ratio), num(reference), num(rel), flag(pass)]);
            out.assert(case, pass, format!("ratio {ratio:.5} vs {reference:.5} ({:+.3}%)", 100.0 * rel));
        };

        // ξ = W(e) with ‖e‖ = 1 is standard normal; ξ² − 1 = 2H₂(ξ) lies in the second chaos
        let unit = |phase: f64| -> Vec<f64> {
            let raw: Vec<f64> = (0..self.cells).map(|i| 1.0 + (i as f64 * 0.7 + phase).sin()).collect();
            let norm = (raw.iter().map(|x| x * x).sum::<f64>() * dt).sqrt();
            raw.iter().map(|x| x / norm).collect()
        };
        let xi = wiener_integral_first(&unit(0.0), &iso, self.samples).expect("sizes match");
        let gaussian_ref = 3f64.powf(0.25);
        let r1 = moment_ratio(&xi, 4.0, 2.0).unwrap_or(f64::NAN);
        row(&mut out, "gaussian", 1, r1, gaussian_ref, (r1 / gaussian_ref - 1.0).abs() <= self.tol_gaussian);

        let chaos2 = ChaosSample::new(xi.values.iter().map(|x| x * x - 1.0).collect(), 2);
        // E(ξ²−1)⁴ = 60, E(ξ²−1)² = 2
        let chaos2_ref = 60f64.powf(0.25) / 2f64.sqrt();
        let r2 = moment_ratio(&chaos2, 4.0, 2.0).unwrap_or(f64::NAN);
        row(&mut out, "chaos2", 2, r2, chaos2_ref, (r2 / chaos2_ref - 1.0).abs() <= self.tol_chaos2);

        let firsts: Vec<ChaosSample> = (0..self.dim)
            .map(|c| wiener_integral_first(&unit(1.3 * (c + 1) as f64), &iso, self.samples).expect("sizes match"))
            .collect();
        let second = double_wiener_integral(&SymmetricKernel::outer(&unit(0.4)), &iso, self.samples)
            .expect("sizes match");
        let mut rng = substream(derive_seed(self.seed, COEFFICIENTS), 0);
        let mut worst_first: f64 = 0.0;
        let mut worst_mixed: f64 = 0.0;
        for _ in 0..self.draws {
            let coeffs: Vec<Vec<f64>> = (0..=self.dim)
                .map(|_| (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let first_terms: Vec<&ChaosSample> = firsts.iter().collect();
            let s1 = ChaosSample::vector_norm(&first_terms, &coeffs[..self.dim]).expect("shapes match");
            worst_first = worst_first.max(moment_ratio(&s1, 4.0, 2.0).unwrap_or(f64::NAN));
            let mixed_terms: Vec<&ChaosSample> = firsts.iter().chain(std::iter::once(&second)).collect();
            let s2 = ChaosSample::vector_norm(&mixed_terms, &coeffs).expect("shapes match");
            worst_mixed = worst_mixed.max(moment_ratio(&s2, 4.0, 2.0).unwrap_or(f64::NAN));
        }
        row(
            &mut out,
            "vector_first_max",
            1,
            worst_first,
            gaussian_ref,
            worst_first <= gaussian_ref * (1.0 + self.tol_gaussian),
        );
        // hypercontractive bound (q−1)^{n/2} at q = 4, n = 2
        row(&mut out, "vector_mixed_max", 2, worst_mixed, 3.0, worst_mixed <= 3.0);
        out.verdicts = out.assertions.clone();
        out.tables = vec![table];
        out
    }
}
