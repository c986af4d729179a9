//! Simulation of scalar H-fractional processes (fractional Brownian motion,
//! Rosenblatt and generalized Hermite processes of order two) and of their
//! finite-dimensional cylindrical versions.

use crate::chaos_core::DiscreteIsonormal;
use crate::error::{check_hurst, Error, Result};
use crate::grid::TimeGrid;
use crate::rng::{derive_seed, substream};
use crate::stats::{linear_fit, product_moment, Estimate};
use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::sync::Arc;

/// Which H-fractional process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FracFamily {
    Fbm,
    Rosenblatt,
    Generalized { alpha: f64, beta: f64, k: u32 },
}

/// Hurst index, scale and family of an H-fractional process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracParams {
    hurst: f64,
    sigma: f64,
    family: FracFamily,
}

impl FracParams {
    pub fn fbm(hurst: f64, sigma: f64) -> Result<Self> {
        check_hurst(hurst)?;
        check_sigma(sigma)?;
        Ok(Self {
            hurst,
            sigma,
            family: FracFamily::Fbm,
        })
    }

    /// Rosenblatt process, H ∈ (1/2, 1).
    pub fn rosenblatt(hurst: f64, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if !(hurst > 0.5 && hurst < 1.0) {
            return Err(Error::Admissibility(format!(
                "Rosenblatt needs H in (1/2, 1), got {hurst}"
            )));
        }
        Ok(Self {
            hurst,
            sigma,
            family: FracFamily::Rosenblatt,
        })
    }

    /// Fractionally filtered generalized Hermite process with
    /// H = α + β + k/2 + 1.
    pub fn generalized(alpha: f64, beta: f64, k: u32, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        let kh = k as f64 / 2.0;
        let lo = -alpha - kh - 1.0;
        let hi = -alpha - kh;
        let admissible = k >= 1 && -1.0 < lo && lo < beta && beta < hi && hi < 0.5;
        let hurst = alpha + beta + kh + 1.0;
        if !admissible || !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::Admissibility(format!(
                "α={alpha}, β={beta}, k={k} (need −1 < −α−k/2−1 < β < −α−k/2 < 1/2)"
            )));
        }
        Ok(Self {
            hurst,
            sigma,
            family: FracFamily::Generalized { alpha, beta, k },
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn family(&self) -> FracFamily {
        self.family
    }

    /// Wiener chaos the process lives in.
    pub fn chaos_order(&self) -> u32 {
        match self.family {
            FracFamily::Fbm => 1,
            FracFamily::Rosenblatt => 2,
            FracFamily::Generalized { k, .. } => k,
        }
    }

    /// (α, β) of the order-two Hermite representation.
    fn hermite_exponents(&self) -> Result<(f64, f64)> {
        match self.family {
            FracFamily::Rosenblatt => Ok((self.hurst - 2.0, 0.0)),
            FracFamily::Generalized { alpha, beta, k: 2 } => Ok((alpha, beta)),
            other => Err(Error::Invalid(format!(
                "order-two Hermite simulation does not apply to {other:?}"
            ))),
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "σ",
            value: sigma,
            range: "(0, ∞)",
        })
    }
}

/// R_H(s,t) = ½(|s|^{2H} + |t|^{2H} − |t−s|^{2H}).
pub fn covariance_rh(s: f64, t: f64, h: f64) -> f64 {
    let p = 2.0 * h;
    0.5 * (s.abs().powf(p) + t.abs().powf(p) - (t - s).abs().powf(p))
}

/// Simulated paths on a grid starting at 0; `paths[p][i]` is z_{t_i} on path p.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    grid: TimeGrid,
    paths: Vec<Vec<f64>>,
    params: FracParams,
    seed: u64,
}

const BINARY_MAGIC: &[u8; 8] = b"FWPATHS1";

impl PathEnsemble {
    pub fn new(grid: TimeGrid, paths: Vec<Vec<f64>>, params: FracParams, seed: u64) -> Result<Self> {
        if let Some(p) = paths.iter().find(|p| p.len() != grid.n_nodes()) {
            return Err(Error::DimensionMismatch(format!(
                "path with {} values on a grid with {} nodes",
                p.len(),
                grid.n_nodes()
            )));
        }
        Ok(Self {
            grid,
            paths,
            params,
            seed,
        })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn params(&self) -> &FracParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Vec<f64>] {
        &self.paths
    }

    pub fn path(&self, p: usize) -> &[f64] {
        &self.paths[p]
    }

    /// Values at node `i` across paths.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p[i]).collect()
    }

    /// z_{t_j} − z_{t_i} across paths.
    pub fn increments(&self, i: usize, j: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p[j] - p[i]).collect()
    }

    /// Empirical E z_{t_i} z_{t_j} with standard error.
    pub fn covariance(&self, i: usize, j: usize) -> Estimate {
        product_moment(&self.column(i), &self.column(j))
    }

    /// Columnar CSV: one row per node, header `t,path_0,…,path_{n−1}`.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.paths.len()).map(|p| format!("path_{p}")));
        w.write_record(&header)?;
        for i in 0..self.grid.n_nodes() {
            let mut row = vec![format!("{}", self.grid.node(i))];
            row.extend(self.paths.iter().map(|p| format!("{}", p[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Binary layout, all little-endian: 8-byte magic `FWPATHS1`, u64 path
    /// count, u64 node count, f64 grid start, f64 grid end, then the paths
    /// row by row as f64.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&(self.paths.len() as u64).to_le_bytes())?;
        out.write_all(&(self.grid.n_nodes() as u64).to_le_bytes())?;
        out.write_all(&self.grid.start().to_le_bytes())?;
        out.write_all(&self.grid.end().to_le_bytes())?;
        for p in &self.paths {
            for v in p {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads the grid and paths written by [`PathEnsemble::write_binary`].
    pub fn read_binary<R: Read>(mut input: R) -> std::io::Result<(TimeGrid, Vec<Vec<f64>>)> {
        let bad = |m: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string());
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(bad("not a path ensemble file"));
        }
        let mut word = [0u8; 8];
        let mut next = |input: &mut R| -> std::io::Result<[u8; 8]> {
            input.read_exact(&mut word)?;
            Ok(word)
        };
        let n_paths = u64::from_le_bytes(next(&mut input)?) as usize;
        let n_nodes = u64::from_le_bytes(next(&mut input)?) as usize;
        let start = f64::from_le_bytes(next(&mut input)?);
        let end = f64::from_le_bytes(next(&mut input)?);
        let grid = TimeGrid::new(start, end, n_nodes.saturating_sub(1)).map_err(|e| bad(&e.to_string()))?;
        let mut paths = Vec::with_capacity(n_paths);
        for _ in 0..n_paths {
            let mut p = Vec::with_capacity(n_nodes);
            for _ in 0..n_nodes {
                p.push(f64::from_le_bytes(next(&mut input)?));
            }
            paths.push(p);
        }
        Ok((grid, paths))
    }
}

/// K independent ensembles on a shared grid: coordinates Z_t(e_1), …, Z_t(e_K)
/// of a cylindrical process truncated to a K-dimensional subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct CylindricalEnsemble {
    components: Vec<PathEnsemble>,
}

impl CylindricalEnsemble {
    pub fn components(&self) -> &[PathEnsemble] {
        &self.components
    }

    pub fn dim_u(&self) -> usize {
        self.components.len()
    }

    /// Empirical E Z_{t_i}(e_a) Z_{t_j}(e_b).
    pub fn cross_covariance(&self, a: usize, b: usize, i: usize, j: usize) -> Estimate {
        product_moment(&self.components[a].column(i), &self.components[b].column(j))
    }
}

/// Exact sampler for fractional Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FbmMethod {
    /// Cholesky factor of the increment covariance; `jitter` is added to the
    /// diagonal, relative to the increment variance.
    Cholesky { jitter: f64 },
    /// Circulant embedding of the increment covariance.
    Circulant,
}

impl Default for FbmMethod {
    fn default() -> Self {
        FbmMethod::Cholesky { jitter: 0.0 }
    }
}

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
fn fgn_autocov(h: f64, k: usize) -> f64 {
    let k = k as f64;
    let p = 2.0 * h;
    0.5 * ((k + 1.0).powf(p) - 2.0 * k.powf(p) + (k - 1.0).abs().powf(p))
}

fn require_origin(grid: &TimeGrid) -> Result<()> {
    if grid.start() == 0.0 {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "process grids start at 0, got {}",
            grid.start()
        )))
    }
}

/// Fractional Brownian motion with the Cholesky sampler.
pub fn simulate_fbm(params: &FracParams, grid: TimeGrid, n_paths: usize, seed: u64) -> Result<PathEnsemble> {
    simulate_fbm_with(params, grid, n_paths, seed, FbmMethod::default())
}

/// Fractional Brownian motion: Gaussian increments with covariance
/// σ² dt^{2H} γ_H(i−j), accumulated from z_0 = 0.
pub fn simulate_fbm_with(
    params: &FracParams,
    grid: TimeGrid,
    n_paths: usize,
    seed: u64,
    method: FbmMethod,
) -> Result<PathEnsemble> {
    let sampler = FbmSampler::new(params, grid, method)?;
    let paths = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| sampler.sample(&mut substream(seed, p)))
        .collect();
    PathEnsemble::new(grid, paths, *params, seed)
}

#[derive(Clone)]
enum FbmFactor {
    Cholesky(DMatrix<f64>),
    Circulant {
        amp: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
}

/// Precomputed exact sampler for fBm paths on a fixed grid.
#[derive(Clone)]
pub struct FbmSampler {
    n: usize,
    scale: f64,
    factor: FbmFactor,
}

impl std::fmt::Debug for FbmSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FbmSampler").field("n", &self.n).field("scale", &self.scale).finish()
    }
}

impl FbmSampler {
    pub fn new(params: &FracParams, grid: TimeGrid, method: FbmMethod) -> Result<Self> {
        if params.family != FracFamily::Fbm {
            return Err(Error::Invalid("fBm sampling needs the FBM family".into()));
        }
        require_origin(&grid)?;
        let n = grid.n_steps();
        let h = params.hurst;
        let scale = params.sigma * grid.dt().powf(h);
        let acov: Vec<f64> = (0..=n).map(|k| fgn_autocov(h, k)).collect();
        let factor = match method {
            FbmMethod::Cholesky { jitter } => {
                let cov = DMatrix::from_fn(n, n, |i, j| {
                    acov[i.abs_diff(j)] + if i == j { jitter } else { 0.0 }
                });
                let chol = cov.cholesky().ok_or_else(|| {
                    Error::NotPositiveDefinite(format!("{n}×{n} increment covariance at H={h}"))
                })?;
                FbmFactor::Cholesky(chol.l())
            }
            FbmMethod::Circulant => {
                let m = 2 * n;
                let mut row: Vec<Complex<f64>> = (0..m)
                    .map(|j| Complex::new(acov[if j <= n { j } else { m - j }], 0.0))
                    .collect();
                let fft = FftPlanner::new().plan_fft_forward(m);
                fft.process(&mut row);
                let top = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
                if row.iter().any(|c| c.re < -1e-10 * top) {
                    return Err(Error::NotPositiveDefinite(format!(
                        "circulant embedding of size {m} at H={h}"
                    )));
                }
                let amp = row.iter().map(|c| (c.re.max(0.0) / m as f64).sqrt()).collect();
                FbmFactor::Circulant { amp, fft }
            }
        };
        Ok(Self { n, scale, factor })
    }

    /// One path z_{t_0} = 0, …, z_{t_n}.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        match &self.factor {
            FbmFactor::Cholesky(l) => {
                let xi = DVector::from_fn(self.n, |_, _| StandardNormal.sample(rng));
                let inc = l * xi;
                cumulate(inc.iter().map(|v| self.scale * v))
            }
            FbmFactor::Circulant { amp, fft } => {
                let mut buf: Vec<Complex<f64>> = amp
                    .iter()
                    .map(|a| {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        Complex::new(a * re, a * im)
                    })
                    .collect();
                fft.process(&mut buf);
                cumulate(buf[..self.n].iter().map(|c| self.scale * c.re))
            }
        }
    }
}

fn cumulate<I: Iterator<Item = f64>>(increments: I) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut acc = 0.0;
    for d in increments {
        acc += d;
        out.push(acc);
    }
    out
}

/// Discretization knobs for the order-two Hermite sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteOptions {
    /// Growth ratio of the u-cells left of −T.
    pub geometric_ratio: f64,
    /// Number of u-cells per grid step on [−T, T].
    pub refinement: usize,
    /// Diagonal regularization added before factorization.
    pub jitter: f64,
}

impl Default for HermiteOptions {
    fn default() -> Self {
        Self {
            geometric_ratio: 1.15,
            refinement: 1,
            jitter: 0.0,
        }
    }
}

/// Discretized order-two Hermite model on a grid.
///
/// z(t) = C ∫ k_t^β(u) :G(u)²: du with G(u) = ∫ (u−y)_+^{α/2} dW(y), so that
/// E z_s z_t = 2C² ∫∫ k_s^β(u) k_t^β(v) E[G(u)G(v)]² du dv and
/// E[G(u)G(v)] ∝ |u−v|^{α+1}. The u-axis is cut into cells; G becomes a
/// Gaussian vector whose covariance is the elementwise square root of the
/// cell-averaged |u−v|^{2α+2}, which keeps second moments of z exact for the
/// cell-averaged kernel. This is the same double Wiener–Itô integral as the
/// kernel form ∫∫ K_t(y₁,y₂) dW dW with K_t = C∫k_t^β(u)(u−y₁)_+^{α/2}(u−y₂)_+^{α/2}du.
#[derive(Debug, Clone)]
pub struct HermiteModel {
    params: FracParams,
    grid: TimeGrid,
    cells: Vec<f64>,
    factor: DMatrix<f64>,
    diag: Vec<f64>,
    weights: DMatrix<f64>,
    gram: DMatrix<f64>,
    calibration: f64,
}

impl HermiteModel {
    /// `window` is A in the u-range [−A, T]; only used for the generalized family.
    pub fn new(params: &FracParams, grid: TimeGrid, window: f64, opts: HermiteOptions) -> Result<Self> {
        let (alpha, beta) = params.hermite_exponents()?;
        require_origin(&grid)?;
        let horizon = grid.end();
        let du = grid.dt() / opts.refinement.max(1) as f64;
        let per_horizon = grid.n_steps() * opts.refinement.max(1);
        let rosenblatt = beta == 0.0;
        let mut cells: Vec<f64> = Vec::new();
        if rosenblatt {
            cells.extend((0..=per_horizon).map(|i| i as f64 * du));
            *cells.last_mut().unwrap() = horizon;
        } else {
            if !(window > horizon) || !(opts.geometric_ratio > 1.0) {
                return Err(Error::Invalid(format!(
                    "window {window} must exceed the horizon {horizon} and the ratio must exceed 1"
                )));
            }
            let mut left = vec![-horizon];
            let mut w = du;
            let mut x = -horizon;
            while x > -window {
                w *= opts.geometric_ratio;
                x = (x - w).max(-window);
                left.push(x);
            }
            left.reverse();
            cells.extend(left);
            cells.extend((1..=2 * per_horizon).map(|i| -horizon + i as f64 * du));
            *cells.last_mut().unwrap() = horizon;
        }
        let m = cells.len() - 1;
        let q = 2.0 * alpha + 2.0;
        let anti = |x: f64| x.abs().powf(q + 2.0) / ((q + 1.0) * (q + 2.0));
        let gram = DMatrix::from_fn(m, m, |i, j| {
            let (a, b, c, d) = (cells[i], cells[i + 1], cells[j], cells[j + 1]);
            let integral = -(anti(b - d) - anti(a - d) - anti(b - c) + anti(a - c));
            integral / ((b - a) * (d - c))
        });
        let mut cov = gram.map(f64::sqrt);
        for i in 0..m {
            cov[(i, i)] += opts.jitter * cov[(i, i)];
        }
        let diag: Vec<f64> = (0..m).map(|i| cov[(i, i)]).collect();
        let factor = cov
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite(format!("{m} u-cells at H={}", params.hurst)))?
            .l();
        let weights = DMatrix::from_fn(grid.n_nodes(), m, |i, a| {
            kernel_cell_weight(grid.node(i), cells[a], cells[a + 1], beta)
        });
        let mut model = Self {
            params: *params,
            grid,
            cells,
            factor,
            diag,
            weights,
            gram,
            calibration: 1.0,
        };
        let last = grid.n_steps();
        let raw = model.covariance(last, last);
        let target = params.sigma.powi(2) * horizon.powf(2.0 * params.hurst);
        model.calibration = (target / raw).sqrt();
        Ok(model)
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() - 1
    }

    /// Normalizing constant C.
    pub fn calibration(&self) -> f64 {
        self.calibration
    }

    /// Exact E z_{t_i} z_{t_j} of the discretized model.
    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        let wi = self.weights.row(i).transpose();
        let wj = self.weights.row(j).transpose();
        2.0 * self.calibration.powi(2) * (wi.transpose() * &self.gram * wj)[(0, 0)]
    }

    /// One path from standard normals drawn from `rng`.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        let m = self.n_cells();
        let xi = DVector::from_fn(m, |_, _| StandardNormal.sample(rng));
        let g = &self.factor * xi;
        let y = DVector::from_fn(m, |a, _| g[a] * g[a] - self.diag[a]);
        let z = &self.weights * y;
        let mut out: Vec<f64> = z.iter().map(|v| self.calibration * v).collect();
        out[0] = 0.0;
        out
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn params(&self) -> &FracParams {
        &self.params
    }
}

/// ∫_a^b k_t^β(u) du, k_t^β(u) = β^{−1}[(t−u)_+^β − (−u)_+^β] and k_t^0 = 1_{(0,t]}.
fn kernel_cell_weight(t: f64, a: f64, b: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return (b.min(t) - a.max(0.0)).max(0.0);
    }
    let p = |x: f64| if x > 0.0 { x.powf(beta + 1.0) / (beta + 1.0) } else { 0.0 };
    ((p(t - a) - p(t - b)) - (p(-a) - p(-b))) / beta
}

/// Rosenblatt or generalized Hermite process of order two. The u-window is
/// [iso.start, T] and the normals come from the substreams of `iso`'s seed.
pub fn simulate_hermite_k2(
    params: &FracParams,
    grid: TimeGrid,
    iso: &DiscreteIsonormal,
    n_paths: usize,
) -> Result<PathEnsemble> {
    simulate_hermite_k2_with(params, grid, iso, n_paths, HermiteOptions::default())
}

pub fn simulate_hermite_k2_with(
    params: &FracParams,
    grid: TimeGrid,
    iso: &DiscreteIsonormal,
    n_paths: usize,
    opts: HermiteOptions,
) -> Result<PathEnsemble> {
    let model = HermiteModel::new(params, grid, -iso.grid().start(), opts)?;
    let seed = iso.seed();
    let paths = (0..n_paths as u64)
        .into_par_iter()
        .map(|p| model.sample(&mut substream(seed, p)))
        .collect();
    PathEnsemble::new(grid, paths, *params, seed)
}

/// Default u-window for the generalized family: A = 1000·T.
pub const HERMITE_WINDOW_FACTOR: f64 = 1000.0;

/// Isonormal window [−1000T, T] matching `grid`, for [`simulate_hermite_k2`].
pub fn hermite_isonormal(grid: &TimeGrid, seed: u64) -> Result<DiscreteIsonormal> {
    DiscreteIsonormal::over_window(grid.end(), HERMITE_WINDOW_FACTOR, grid.n_steps(), seed)
}

/// Scalar simulation of any supported family with default settings.
pub fn simulate_scalar(params: &FracParams, grid: TimeGrid, n_paths: usize, seed: u64) -> Result<PathEnsemble> {
    match params.family {
        FracFamily::Fbm => simulate_fbm(params, grid, n_paths, seed),
        _ => simulate_hermite_k2(params, grid, &hermite_isonormal(&grid, seed)?, n_paths),
    }
}

/// Per-path sampler for any supported family on a fixed grid.
#[derive(Debug, Clone)]
pub enum NoiseSampler {
    Fbm(FbmSampler),
    Hermite(Box<HermiteModel>),
}

impl NoiseSampler {
    /// fBm uses `method`; the Hermite families use the default window and options.
    pub fn new(params: &FracParams, grid: TimeGrid, method: FbmMethod) -> Result<Self> {
        match params.family {
            FracFamily::Fbm => Ok(Self::Fbm(FbmSampler::new(params, grid, method)?)),
            _ => Ok(Self::Hermite(Box::new(HermiteModel::new(
                params,
                grid,
                HERMITE_WINDOW_FACTOR * grid.end(),
                HermiteOptions::default(),
            )?))),
        }
    }

    /// Path `index` of the stream family `seed`.
    pub fn path(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = substream(seed, index);
        match self {
            Self::Fbm(s) => s.sample(&mut rng),
            Self::Hermite(m) => m.sample(&mut rng),
        }
    }
}

/// `dim_u` independent components; component c uses seed `derive_seed(seed, c)`.
pub fn simulate_cylindrical(
    params: &FracParams,
    grid: TimeGrid,
    dim_u: usize,
    n_paths: usize,
    seed: u64,
) -> Result<CylindricalEnsemble> {
    if dim_u == 0 {
        return Err(Error::Invalid("dim_U must be at least 1".into()));
    }
    let components = (0..dim_u as u64)
        .map(|c| simulate_scalar(params, grid, n_paths, derive_seed(seed, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CylindricalEnsemble { components })
}

/// Slope of log RMS increment against log lag over the dyadic lags
/// 1, 2, 4, … ≤ `max_lag` steps, pooling all paths and start nodes.
pub fn holder_exponent_regression(ens: &PathEnsemble, max_lag: usize) -> Result<f64> {
    let n = ens.grid.n_steps();
    let mut lags = Vec::new();
    let mut lag = 1;
    while lag <= max_lag.min(n / 2) {
        lags.push(lag);
        lag *= 2;
    }
    if lags.len() < 2 || ens.paths.is_empty() {
        return Err(Error::DegenerateSample);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &l in &lags {
        let mut acc = 0.0;
        let mut count = 0usize;
        for p in &ens.paths {
            for i in 0..=(n - l) {
                let d = p[i + l] - p[i];
                acc += d * d;
                count += 1;
            }
        }
        xs.push((l as f64 * ens.grid.dt()).ln());
        ys.push((acc / count as f64).sqrt().ln());
    }
    Ok(linear_fit(&xs, &ys).0)
}
