//! Hermite polynomials, a discretized isonormal process, multiple
//! Wiener–Itô integrals of order one and two, and moment-ratio diagnostics.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::rng::substream;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// H_n(x) = (−1)ⁿ/n! · e^{x²/2} dⁿ/dxⁿ e^{−x²/2}, via
/// (n+1)H_{n+1}(x) = x H_n(x) − H_{n−1}(x).
pub fn hermite_poly(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = (x * cur - prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
    }
    cur
}

/// Hermite polynomials H_0 … H_n under the normalization of [`hermite_poly`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermiteBasis {
    max_order: usize,
}

impl HermiteBasis {
    pub fn new(max_order: usize) -> Self {
        Self { max_order }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Values `[H_0(x), …, H_n(x)]`.
    pub fn eval(&self, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.max_order + 1);
        out.push(1.0);
        let mut prev = 0.0;
        for k in 0..self.max_order {
            let cur = out[k];
            out.push((x * cur - prev) / (k + 1) as f64);
            prev = cur;
        }
        out
    }
}

/// White noise on a uniform grid over a window `[−A, T]`: per path, i.i.d.
/// N(0, dt) increments drawn from the `(seed, path)` substream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteIsonormal {
    grid: TimeGrid,
    seed: u64,
}

impl DiscreteIsonormal {
    pub fn new(grid: TimeGrid, seed: u64) -> Self {
        Self { grid, seed }
    }

    /// Window `[−window_factor·horizon, horizon]` with cells of width
    /// `horizon / steps_per_horizon`.
    pub fn over_window(
        horizon: f64,
        window_factor: f64,
        steps_per_horizon: usize,
        seed: u64,
    ) -> Result<Self> {
        let n = ((1.0 + window_factor) * steps_per_horizon as f64).round() as usize;
        let grid = TimeGrid::new(-window_factor * horizon, horizon, n)?;
        Ok(Self { grid, seed })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Increments ΔW_i of path `path`.
    pub fn increments(&self, path: u64) -> Vec<f64> {
        let mut rng = substream(self.seed, path);
        let sd = self.grid.dt().sqrt();
        (0..self.grid.n_steps())
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sd * z
            })
            .collect()
    }
}

/// Symmetric kernel on the cells of an isonormal grid, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricKernel {
    n: usize,
    values: Vec<f64>,
    symmetrized: bool,
}

impl SymmetricKernel {
    /// Builds the kernel, replacing a non-symmetric input by
    /// (K + Kᵀ)/2 and recording that it did so.
    pub fn new(n: usize, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "kernel has {} entries, expected {}",
                values.len(),
                n * n
            )));
        }
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut symmetrized = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if (a - b).abs() > 1e-12 * scale {
                    symmetrized = true;
                }
                let m = 0.5 * (a + b);
                values[i * n + j] = m;
                values[j * n + i] = m;
            }
        }
        Ok(Self {
            n,
            values,
            symmetrized,
        })
    }

    /// K = e ⊗ e.
    pub fn outer(e: &[f64]) -> Self {
        let n = e.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = e[i] * e[j];
            }
        }
        Self {
            n,
            values,
            symmetrized: false,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn was_symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// Σ_{i≠j} K_ij² dt², the squared L² norm off the diagonal cells.
    pub fn offdiag_norm_sq(&self, dt: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s * dt * dt
    }
}

/// Monte Carlo sample of a random variable from a finite chaos.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosSample {
    pub values: Vec<f64>,
    /// Largest chaos component present.
    pub order: usize,
    /// Set when an input kernel had to be symmetrized.
    pub symmetrized: bool,
}

impl ChaosSample {
    pub fn new(values: Vec<f64>, order: usize) -> Self {
        Self {
            values,
            order,
            symmetrized: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pathwise linear combination Σ c_i ξ_i of samples on the same paths.
    pub fn combine(terms: &[(&ChaosSample, f64)]) -> Result<ChaosSample> {
        let n = terms.first().map_or(0, |(s, _)| s.len());
        if terms.iter().any(|(s, _)| s.len() != n) {
            return Err(Error::DimensionMismatch("samples differ in length".into()));
        }
        let mut values = vec![0.0; n];
        for (s, c) in terms {
            for (v, x) in values.iter_mut().zip(&s.values) {
                *v += c * x;
            }
        }
        let order = terms.iter().map(|(s, _)| s.order).max().unwrap_or(0);
        Ok(ChaosSample::new(values, order))
    }

    /// Pathwise Euclidean norm |Σ_i c_i ξ_i| for vector coefficients c_i.
    pub fn vector_norm(terms: &[&ChaosSample], coeffs: &[Vec<f64>]) -> Result<ChaosSample> {
        if terms.len() != coeffs.len() {
            return Err(Error::DimensionMismatch(
                "one coefficient vector per sample required".into(),
            ));
        }
        let n = terms.first().map_or(0, |s| s.len());
        let dim = coeffs.first().map_or(0, |c| c.len());
        if terms.iter().any(|s| s.len() != n) || coeffs.iter().any(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch("ragged input".into()));
        }
        let mut values = vec![0.0; n];
        let mut acc = vec![0.0; dim];
        for (p, out) in values.iter_mut().enumerate() {
            acc.iter_mut().for_each(|a| *a = 0.0);
            for (s, c) in terms.iter().zip(coeffs) {
                let x = s.values[p];
                for (a, ci) in acc.iter_mut().zip(c) {
                    *a += ci * x;
                }
            }
            *out = acc.iter().map(|a| a * a).sum::<f64>().sqrt();
        }
        let order = terms.iter().map(|s| s.order).max().unwrap_or(0);
        Ok(ChaosSample::new(values, order))
    }
}

/// First-order integral W(v) = Σ v_i ΔW_i of a cell function `v`.
pub fn wiener_integral_first(
    v: &[f64],
    iso: &DiscreteIsonormal,
    n_paths: usize,
) -> Result<ChaosSample> {
    if v.len() != iso.grid().n_steps() {
        return Err(Error::DimensionMismatch(format!(
            "integrand has {} cells, grid has {}",
            v.len(),
            iso.grid().n_steps()
        )));
    }
    let values = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let dw = iso.increments(p);
            v.iter().zip(&dw).map(|(a, b)| a * b).sum()
        })
        .collect();
    Ok(ChaosSample::new(values, 1))
}

/// Off-diagonal double sum Σ_{i≠j} K_ij ΔW_i ΔW_j per path, the discrete
/// double Wiener–Itô integral of `kernel`.
pub fn double_wiener_integral(
    kernel: &SymmetricKernel,
    iso: &DiscreteIsonormal,
    n_paths: usize,
) -> Result<ChaosSample> {
    let n = kernel.size();
    if n != iso.grid().n_steps() {
        return Err(Error::DimensionMismatch(format!(
            "kernel is {n}×{n}, grid has {} cells",
            iso.grid().n_steps()
        )));
    }
    let values = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| {
            let dw = iso.increments(p);
            let mut total = 0.0;
            for i in 0..n {
                let row = &kernel.values[i * n..(i + 1) * n];
                let mut acc = 0.0;
                for (j, k) in row.iter().enumerate() {
                    if j != i {
                        acc += k * dw[j];
                    }
                }
                total += acc * dw[i];
            }
            total
        })
        .collect();
    Ok(ChaosSample {
        values,
        order: 2,
        symmetrized: kernel.was_symmetrized(),
    })
}

/// (Ê|ξ|^q)^{1/q} / (Ê|ξ|^p)^{1/p}.
pub fn moment_ratio(sample: &ChaosSample, q: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return Err(Error::Invalid(format!("moment orders must be positive, got q={q}, p={p}")));
    }
    if sample.is_empty() {
        return Err(Error::DegenerateSample);
    }
    let n = sample.len() as f64;
    let mq = sample.values.iter().map(|x| x.abs().powf(q)).sum::<f64>() / n;
    let mp = sample.values.iter().map(|x| x.abs().powf(p)).sum::<f64>() / n;
    if mp <= 0.0 || !mp.is_finite() {
        return Err(Error::DegenerateSample);
    }
    Ok(mq.powf(1.0 / q) / mp.powf(1.0 / p))
}
