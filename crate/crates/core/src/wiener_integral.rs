//! Wiener integrals of step functions against simulated fractional paths,
//! cylindrical integrals of Hilbert–Schmidt integrands, γ-radonifying norms
//! of L^p kernel fields and finiteness conditions for convolution integrands.

use crate::error::{check_hurst, Error, Result};
use crate::frac_process::{CylindricalEnsemble, FracParams, PathEnsemble};
use crate::quad::tanh_sinh;
use crate::sobolev::{dh_norm_kstar, StepFunction};
use crate::stats::{mean_estimate, second_moment, Estimate};
use serde::Serialize;

/// Per-path values of i_T(f) = Σ_j f_j (z_{t_j} − z_{t_{j−1}}).
#[derive(Debug, Clone, PartialEq)]
pub struct ElementaryIntegralResult {
    pub samples: Vec<f64>,
    /// The integrand after snapping its breakpoints to the grid.
    pub f: StepFunction,
    pub params: FracParams,
    /// (original, snapped) for every breakpoint that moved.
    pub snapped: Vec<(f64, f64)>,
}

impl ElementaryIntegralResult {
    /// Empirical mean with standard error.
    pub fn mean(&self) -> Estimate {
        mean_estimate(&self.samples)
    }

    /// Empirical E i_T(f)² with standard error; the integral is centered.
    pub fn second_moment(&self) -> Estimate {
        second_moment(&self.samples)
    }
}

/// Node indices, and the (original, snapped) breakpoints that moved.
type Snapped = (Vec<usize>, Vec<(f64, f64)>);

/// Node indices of the breakpoints of `f` on `grid`, within half a step.
fn snap_breakpoints(f: &StepFunction, ens: &PathEnsemble) -> Result<Snapped> {
    let grid = ens.grid();
    let tol = 0.5 * grid.dt();
    let mut idx = Vec::with_capacity(f.breakpoints().len());
    let mut moved = Vec::new();
    for &t in f.breakpoints() {
        let i = grid.snap(t, tol).ok_or(Error::OffGrid(t))?;
        let node = grid.node(i);
        if node != t {
            moved.push((t, node));
        }
        idx.push(i);
    }
    Ok((idx, moved))
}

/// Stieltjes sums of `f` along every path of `ens`.
pub fn elementary_integral(f: &StepFunction, ens: &PathEnsemble) -> Result<ElementaryIntegralResult> {
    let (idx, snapped) = snap_breakpoints(f, ens)?;
    let samples = ens
        .paths()
        .iter()
        .map(|z| {
            idx.windows(2)
                .zip(f.values())
                .map(|(w, v)| v * (z[w[1]] - z[w[0]]))
                .sum()
        })
        .collect();
    // rebuild the integrand on the snapped nodes, dropping collapsed pieces
    let grid = ens.grid();
    let mut bp = Vec::new();
    let mut vals = Vec::new();
    for (w, v) in idx.windows(2).zip(f.values()) {
        if w[1] > w[0] {
            if bp.last() != Some(&grid.node(w[0])) {
                if !bp.is_empty() {
                    vals.push(0.0);
                }
                bp.push(grid.node(w[0]));
            }
            bp.push(grid.node(w[1]));
            vals.push(*v);
        }
    }
    let snapped_f = StepFunction::new(bp, vals)?;
    Ok(ElementaryIntegralResult {
        samples,
        f: snapped_f,
        params: *ens.params(),
        snapped,
    })
}

/// Monte Carlo second moment of i_T(f) against ‖f‖²_{D^H}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsometryReport {
    pub mc_var: f64,
    pub mc_se: f64,
    pub dh_norm_sq: f64,
    /// (mc_var − dh_norm_sq)/SE(mc_var); 0 when both vanish.
    pub z_score: f64,
}

pub fn isometry_report(f: &StepFunction, ens: &PathEnsemble) -> Result<IsometryReport> {
    let res = elementary_integral(f, ens)?;
    let est = res.second_moment();
    let dh_norm_sq = dh_norm_kstar(&res.f, ens.params()).powi(2);
    let z_score = if est.se == 0.0 && (est.value - dh_norm_sq).abs() <= 1e-300 {
        0.0
    } else {
        est.z_score(dh_norm_sq)
    };
    Ok(IsometryReport {
        mc_var: est.value,
        mc_se: est.se,
        dh_norm_sq,
        z_score,
    })
}

/// Finite-rank integrand A: U → D^H(T), given by its columns A e_k.
#[derive(Debug, Clone, PartialEq)]
pub struct HsOperator {
    columns: Vec<StepFunction>,
}

impl HsOperator {
    pub fn new(columns: Vec<StepFunction>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Invalid("operator needs at least one column".into()));
        }
        Ok(Self { columns })
    }

    pub fn columns(&self) -> &[StepFunction] {
        &self.columns
    }

    pub fn dim_u(&self) -> usize {
        self.columns.len()
    }

    /// Cumulative sums Σ_{k ≤ K} ‖A e_k‖²_{D^H}.
    pub fn partial_hs_norms_sq(&self, params: &FracParams) -> Vec<f64> {
        let mut acc = 0.0;
        self.columns
            .iter()
            .map(|c| {
                acc += dh_norm_kstar(c, params).powi(2);
                acc
            })
            .collect()
    }

    pub fn hs_norm_sq(&self, params: &FracParams) -> f64 {
        *self.partial_hs_norms_sq(params).last().unwrap()
    }
}

/// Tail Σ_{k > K} of a series with positive terms, extrapolated geometrically
/// from the last two terms; infinite when they do not decay.
pub fn geometric_tail(partial: &[f64]) -> f64 {
    let n = partial.len();
    if n < 3 {
        return f64::INFINITY;
    }
    let last = partial[n - 1] - partial[n - 2];
    let prev = partial[n - 2] - partial[n - 3];
    if last == 0.0 {
        return 0.0;
    }
    let rho = last / prev;
    if rho > 0.0 && rho < 1.0 {
        last * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    }
}

/// ξ = Σ_k ∫ A e_k dZ(e_k), with its Hilbert–Schmidt norm and truncation tail.
#[derive(Debug, Clone, PartialEq)]
pub struct CylindricalIntegralResult {
    pub samples: Vec<f64>,
    pub hs_norm_sq: f64,
    pub partial_hs_norms_sq: Vec<f64>,
    /// Estimated Σ_{k > dim U} ‖A e_k‖², from the decay of the last columns.
    pub tail_estimate: f64,
}

impl CylindricalIntegralResult {
    pub fn second_moment(&self) -> Estimate {
        second_moment(&self.samples)
    }
}

pub fn cylindrical_integral(a: &HsOperator, ens: &CylindricalEnsemble) -> Result<CylindricalIntegralResult> {
    if a.dim_u() != ens.dim_u() {
        return Err(Error::DimensionMismatch(format!(
            "operator has {} columns, ensemble has {} components",
            a.dim_u(),
            ens.dim_u()
        )));
    }
    let comps = ens.components();
    let mut samples = vec![0.0; comps[0].n_paths()];
    for (col, comp) in a.columns.iter().zip(comps) {
        if comp.n_paths() != samples.len() {
            return Err(Error::DimensionMismatch("components differ in path count".into()));
        }
        let r = elementary_integral(col, comp)?;
        for (s, v) in samples.iter_mut().zip(&r.samples) {
            *s += v;
        }
    }
    let params = comps[0].params();
    let partial = a.partial_hs_norms_sq(params);
    Ok(CylindricalIntegralResult {
        samples,
        hs_norm_sq: *partial.last().unwrap(),
        tail_estimate: geometric_tail(&partial),
        partial_hs_norms_sq: partial,
    })
}

/// Pointwise kernel a: D → D^H(T; U) of an operator into L^p(D), sampled at
/// quadrature nodes of D. `kernels[x]` lists the U-components of a(x).
#[derive(Debug, Clone, PartialEq)]
pub struct LpKernelField {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kernels: Vec<Vec<StepFunction>>,
    p: f64,
    params: FracParams,
}

impl LpKernelField {
    pub fn new(
        nodes: Vec<f64>,
        weights: Vec<f64>,
        kernels: Vec<Vec<StepFunction>>,
        p: f64,
        params: FracParams,
    ) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::Domain {
                name: "p",
                value: p,
                range: "[1, ∞)",
            });
        }
        if nodes.len() != weights.len() || nodes.len() != kernels.len() || nodes.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} nodes, {} weights, {} kernels",
                nodes.len(),
                weights.len(),
                kernels.len()
            )));
        }
        Ok(Self {
            nodes,
            weights,
            kernels,
            p,
            params,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// ‖a(x)‖_{D^H(T;U)} at every node.
    pub fn pointwise_norms(&self) -> Vec<f64> {
        self.kernels
            .iter()
            .map(|comps| {
                comps
                    .iter()
                    .map(|c| dh_norm_kstar(c, &self.params).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

/// (Σ_x w_x ‖a(x)‖^p_{D^H(T;U)})^{1/p}, the mixed norm equivalent to the
/// γ-radonifying norm of the operator.
pub fn gamma_norm_lp(field: &LpKernelField) -> f64 {
    mixed_norm(&field.weights, &field.pointwise_norms(), field.p)
}

/// (Σ_x w_x n_x^p)^{1/p}.
pub fn mixed_norm(weights: &[f64], norms: &[f64], p: f64) -> f64 {
    weights
        .iter()
        .zip(norms)
        .map(|(w, n)| w * n.powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Result of a finiteness-condition evaluation along a ladder of inner
/// cutoffs ε_j = τ 2^{−j}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// Extrapolated value, +∞ when diverged.
    pub value: f64,
    pub diverged: bool,
    /// Condition restricted to (ε_j, τ) at each level.
    pub levels: Vec<f64>,
}

const LADDER_LEVELS: usize = 30;
const INNER_TOL: f64 = 1e-10;

/// Classifies the cumulative values of a cutoff ladder. Diverged when the
/// last two refinements grow by more than 1.5, when the increments stop
/// decaying, or when the extrapolated tail exceeds ten times the value.
pub(crate) fn classify(levels: Vec<f64>) -> ConditionReport {
    let n = levels.len();
    let last = levels[n - 1];
    if last == 0.0 {
        return ConditionReport {
            value: 0.0,
            diverged: false,
            levels,
        };
    }
    let d1 = last - levels[n - 2];
    let d0 = levels[n - 2] - levels[n - 3];
    let growth = last / levels[n - 3];
    let rho = if d0 > 0.0 { d1 / d0 } else { 0.0 };
    let tail = if d1 > 0.0 && rho < 1.0 { d1 * rho / (1.0 - rho) } else { 0.0 };
    let diverged = !last.is_finite() || growth > 1.5 || rho >= 0.99 || tail > 10.0 * last;
    ConditionReport {
        value: if diverged { f64::INFINITY } else { last + tail },
        diverged,
        levels,
    }
}

/// ∫₀^τ G(u)² du + ∫₀^τ∫₀^τ (G(u) − G(v))² |u−v|^{2H−2} du dv for H ∈ (0, 1/2),
/// where G(u) stands for the operator norm profile of the integrand.
pub fn condition_singular<G: Fn(f64) -> f64>(g: G, h: f64, tau: f64) -> Result<ConditionReport> {
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::Domain {
            name: "H",
            value: h,
            range: "(0, 1/2)",
        });
    }
    check_tau(tau)?;
    let q = 2.0 * h - 2.0;
    // inner ∫_{v0}^{v1} (G(u)−G(v))² (u−v)^{2H−2} dv for v1 ≤ u
    let inner = |u: f64, v0: f64, v1: f64| -> f64 {
        let gu = g(u);
        let gap = u - v1;
        tanh_sinh(
            |_, db| {
                let d = gap + db;
                let v = u - d;
                let diff = gu - g(v);
                diff * diff * d.powf(q)
            },
            v0,
            v1,
            INNER_TOL,
        )
    };
    let mut levels = Vec::with_capacity(LADDER_LEVELS);
    let mut total = 0.0;
    let mut hi = tau;
    for j in 1..=LADDER_LEVELS {
        let lo = tau * 0.5f64.powi(j as i32);
        if j == 1 {
            // whole (ε₁, τ) block
            total += tanh_sinh(|_, db| g(hi - db).powi(2), lo, hi, INNER_TOL);
            total += 2.0 * tanh_sinh(|da, _| inner(lo + da, lo, lo + da), lo, tau, INNER_TOL);
        } else {
            // strip (ε_j, ε_{j−1}) against itself and against (ε_{j−1}, τ)
            total += tanh_sinh(|_, db| g(hi - db).powi(2), lo, hi, INNER_TOL);
            total += 2.0 * tanh_sinh(|da, _| inner(lo + da, lo, lo + da), lo, hi, INNER_TOL);
            total += 2.0 * tanh_sinh(|da, _| inner(hi + da, lo, hi), hi, tau, INNER_TOL);
        }
        levels.push(total);
        hi = lo;
    }
    Ok(classify(levels))
}

/// ∫₀^τ |G(u)|^{1/H} du for H ∈ [1/2, 1).
pub fn condition_regular<G: Fn(f64) -> f64>(g: G, h: f64, tau: f64) -> Result<ConditionReport> {
    check_hurst(h)?;
    if h < 0.5 {
        return Err(Error::Domain {
            name: "H",
            value: h,
            range: "[1/2, 1)",
        });
    }
    check_tau(tau)?;
    let e = 1.0 / h;
    let mut levels = Vec::with_capacity(LADDER_LEVELS);
    let mut total = 0.0;
    let mut hi = tau;
    for j in 1..=LADDER_LEVELS {
        let lo = tau * 0.5f64.powi(j as i32);
        total += tanh_sinh(|da, _| g(lo + da).abs().powf(e), lo, hi, INNER_TOL);
        levels.push(total);
        hi = lo;
    }
    Ok(classify(levels))
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "τ",
            value: tau,
            range: "(0, ∞)",
        })
    }
}
