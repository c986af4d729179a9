//! Homogeneous fractional Sobolev norms Ẇ^{s,2}(ℝ), |s| < 1/2, the operator
//! K*_H that makes Stieltjes sums against an H-fractional process isometric
//! to L²(ℝ), and the averaging, dilation and restriction operators acting on
//! step functions.
//!
//! Fourier convention: f̂(x) = (2π)^{−1/2} ∫ f(t) e^{−ixt} dt (unitary,
//! angular frequency). Functions on intervals are extended by zero.
//!
//! With s = 1/2 − H, every step function satisfies
//! σ‖K*_H f‖_{L²} = C_{σ,H} ‖f‖_{Ẇ^{s,2}} where
//! C_{σ,H} = σΓ(H+1/2)/c_H = σ√(Γ(2H+1) sin πH).

use crate::error::{check_hurst, Error, Result};
use crate::frac_process::FracParams;
use crate::grid::TimeGrid;
use crate::quad::{exp_sinh, tanh_sinh};
use crate::special::{damped_growth_moment, gamma, hurwitz_zeta, lower_gamma, riemann_zeta};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const QUAD_TOL: f64 = 1e-11;

/// Finitely many pieces: value `values[j]` on `[breakpoints[j], breakpoints[j+1])`,
/// zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            if breakpoints.len() > 1 {
                return Err(Error::Invalid("breakpoints without values".into()));
            }
            return Ok(Self::zero());
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::Invalid(format!(
                "{} values need {} breakpoints, got {}",
                values.len(),
                values.len() + 1,
                breakpoints.len()
            )));
        }
        if breakpoints.iter().any(|t| !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("non-finite step function data".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("breakpoints must be strictly increasing".into()));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn zero() -> Self {
        Self {
            breakpoints: Vec::new(),
            values: Vec::new(),
        }
    }

    /// 1_{[a,b)}.
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![1.0])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_pieces(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    /// Smallest interval outside of which the function vanishes.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.values.iter().position(|v| *v != 0.0)?;
        let last = self.values.iter().rposition(|v| *v != 0.0)?;
        Some((self.breakpoints[first], self.breakpoints[last + 1]))
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.values.is_empty() || x < self.breakpoints[0] {
            return 0.0;
        }
        let j = self.breakpoints.partition_point(|t| *t <= x);
        if j == 0 || j > self.values.len() {
            0.0
        } else {
            self.values[j - 1]
        }
    }

    /// Jump decomposition f = Σ_m J_m 1_{[τ_m, ∞)}; the jumps sum to zero.
    pub fn jumps(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.values.len();
        if n == 0 {
            return (Vec::new(), Vec::new());
        }
        let mut j = Vec::with_capacity(n + 1);
        j.push(self.values[0]);
        for w in self.values.windows(2) {
            j.push(w[1] - w[0]);
        }
        j.push(-self.values[n - 1]);
        (self.breakpoints.clone(), j)
    }

    /// c·f.
    pub fn scale(&self, c: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Pointwise linear combination a·f + b·g.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Self {
        let mut pts: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        if pts.len() < 2 {
            return Self::zero();
        }
        let values = pts
            .windows(2)
            .map(|w| a * self.eval(w[0]) + b * other.eval(w[0]))
            .collect();
        Self {
            breakpoints: pts,
            values,
        }
    }

    /// x ↦ F(ax + b).
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Domain {
                name: "a",
                value: a,
                range: "ℝ∖{0}",
            });
        }
        let mut bp: Vec<f64> = self.breakpoints.iter().map(|t| (t - b) / a).collect();
        let mut vals = self.values.clone();
        if a < 0.0 {
            bp.reverse();
            vals.reverse();
        }
        Self::new(bp, vals)
    }

    /// 1_{[lo,hi)} F.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        if self.values.is_empty() || hi <= lo {
            return Self::zero();
        }
        let mut pts = vec![lo];
        pts.extend(self.breakpoints.iter().copied().filter(|t| *t > lo && *t < hi));
        pts.push(hi);
        let values = pts.windows(2).map(|w| self.eval(w[0])).collect();
        Self {
            breakpoints: pts,
            values,
        }
    }

    /// L^p(ℝ) norm, p ≥ 1.
    pub fn lp_norm(&self, p: f64) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (w[1] - w[0]) * v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// Cell averages on `grid` (exact when the breakpoints are grid nodes).
    pub fn to_grid_function(&self, grid: TimeGrid) -> GridFunction {
        let h = grid.dt();
        let values = (0..grid.n_steps())
            .map(|i| {
                let (c0, c1) = (grid.node(i), grid.node(i + 1));
                let mut acc = 0.0;
                for (w, v) in self.breakpoints.windows(2).zip(&self.values) {
                    let lo = w[0].max(c0);
                    let hi = w[1].min(c1);
                    if hi > lo {
                        acc += v * (hi - lo);
                    }
                }
                acc / h
            })
            .collect();
        GridFunction { grid, values }
    }
}

/// Piecewise-constant function on the cells `[t_i, t_{i+1})` of a grid,
/// zero outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_steps() {
            return Err(Error::DimensionMismatch(format!(
                "{} cell values for a grid with {} cells",
                values.len(),
                grid.n_steps()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at cell midpoints.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: TimeGrid, f: F) -> Self {
        let values = (0..grid.n_steps()).map(|i| f(grid.midpoint(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_step_function(&self) -> StepFunction {
        StepFunction {
            breakpoints: self.grid.nodes(),
            values: self.values.clone(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dt()).sqrt()
    }
}

/// Smoothness index s of Ẇ^{s,2}, restricted to |s| < 1/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevOrder(f64);

impl SobolevOrder {
    pub fn new(s: f64) -> Result<Self> {
        if s.abs() < 0.5 {
            Ok(Self(s))
        } else {
            Err(Error::Domain {
                name: "s",
                value: s,
                range: "(−1/2, 1/2)",
            })
        }
    }

    /// s = 1/2 − H.
    pub fn from_hurst(h: f64) -> Result<Self> {
        check_hurst(h)?;
        Self::new(0.5 - h)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Spatial domain of the Gagliardo seminorm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Line,
    Interval(f64, f64),
}

/// c_H = (∫₀^∞ [(1+s)^{H−1/2} − s^{H−1/2}]² ds + 1/(2H))^{1/2}.
pub fn c_h_constant(h: f64) -> Result<f64> {
    check_hurst(h)?;
    let a = h - 0.5;
    if a == 0.0 {
        return Ok(1.0);
    }
    // (1+s)^a − s^a, written to avoid cancellation for large s
    let diff = move |s: f64| -> f64 {
        if s >= 1.0 {
            s.powf(a) * (a * (1.0 / s).ln_1p()).exp_m1()
        } else {
            (1.0 + s).powf(a) - s.powf(a)
        }
    };
    let near = tanh_sinh(|s, _| diff(s).powi(2), 0.0, 1.0, 1e-13);
    let far = exp_sinh(|d| diff(1.0 + d).powi(2), 1.0, 1e-13);
    Ok((near + far + 0.5 / h).sqrt())
}

/// C_{σ,H} = σΓ(H+1/2)/c_H, the constant in ‖f‖_{D^H} = C_{σ,H}‖f‖_{Ẇ^{1/2−H,2}}.
/// Equivalently (σ/c_H)|H−1/2||Γ(H−1/2)|; equals σ at H = 1/2.
pub fn c_sigma_h_constant(sigma: f64, h: f64) -> Result<f64> {
    check_hurst(h)?;
    if !(sigma > 0.0) {
        return Err(Error::Domain {
            name: "σ",
            value: sigma,
            range: "(0, ∞)",
        });
    }
    if h == 0.5 {
        return Ok(sigma);
    }
    Ok(sigma * gamma(h + 0.5) / c_h_constant(h)?)
}

/// K*_H f at a single point r (not a breakpoint when H < 1/2).
///
/// For H ≠ 1/2, K*_H f(r) = ((H−1/2)/c_H) ∫_r^∞ [f(u) − f(r)·1_{H<1/2}](u−r)^{H−3/2} du,
/// which on step functions reduces to −(1/c_H) Σ_{τ_m > r} J_m (τ_m − r)^{H−1/2}.
pub fn kstar_value(f: &StepFunction, h: f64, r: f64) -> Result<f64> {
    check_hurst(h)?;
    if h == 0.5 {
        return Ok(f.eval(r));
    }
    let c = c_h_constant(h)?;
    Ok(kstar_sum(f, h - 0.5, c, r))
}

fn kstar_sum(f: &StepFunction, a: f64, c: f64, r: f64) -> f64 {
    let (taus, jumps) = f.jumps();
    let mut acc = 0.0;
    for (t, j) in taus.iter().zip(&jumps) {
        if *t > r {
            acc += j * (t - r).powf(a);
        }
    }
    -acc / c
}

/// K*_H f sampled at the cell midpoints of `out_grid`.
pub fn kstar_transform(f: &StepFunction, h: f64, out_grid: TimeGrid) -> Result<GridFunction> {
    check_hurst(h)?;
    if h == 0.5 {
        return Ok(GridFunction::from_fn(out_grid, |r| f.eval(r)));
    }
    let c = c_h_constant(h)?;
    let a = h - 0.5;
    Ok(GridFunction::from_fn(out_grid, |r| kstar_sum(f, a, c, r)))
}

/// ‖K*_H f‖_{L²(ℝ)}.
///
/// K*_H f vanishes right of the last breakpoint. Between breakpoints and on
/// the left tail it is a finite sum of powers of the distance to the
/// breakpoints; each piece is integrated with a double-exponential rule fed
/// with endpoint distances, which resolves the (τ−r)^{2H−1} singularities.
pub fn kstar_l2_norm(f: &StepFunction, h: f64) -> Result<f64> {
    check_hurst(h)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    if h == 0.5 {
        return Ok(f.lp_norm(2.0));
    }
    let a = h - 0.5;
    let c = c_h_constant(h)?;
    let (taus, jumps) = f.jumps();
    let n = taus.len();
    let mut total = 0.0;
    // pieces (τ_j, τ_{j+1}); db = τ_{j+1} − r
    for j in 0..n - 1 {
        let (lo, hi) = (taus[j], taus[j + 1]);
        let piece = tanh_sinh(
            |_, db| {
                let mut s = 0.0;
                for m in (j + 1)..n {
                    s += jumps[m] * ((taus[m] - hi) + db).powf(a);
                }
                s * s
            },
            lo,
            hi,
            QUAD_TOL,
        );
        total += piece;
    }
    // left tail r < τ_0 with d = τ_0 − r; uses Σ J_m = 0
    let offsets: Vec<f64> = taus.iter().map(|t| t - taus[0]).collect();
    let tail_value = |d: f64| -> f64 {
        let mut s = 0.0;
        for (off, jm) in offsets.iter().zip(&jumps).skip(1) {
            s += jm * (a * (off / d).ln_1p()).exp_m1();
        }
        let v = d.powf(a) * s;
        v * v
    };
    let mut lo = 0.0;
    for &off in offsets.iter().skip(1) {
        if off > lo {
            total += tanh_sinh(|da, _| tail_value(lo + da), lo, off, QUAD_TOL);
            lo = off;
        }
    }
    total += exp_sinh(|d| tail_value(lo + d), lo.max(1e-300), QUAD_TOL);
    Ok(total.sqrt() / c)
}

/// ‖f‖_{D^H} = σ‖K*_H f‖_{L²(ℝ)}.
pub fn dh_norm_kstar(f: &StepFunction, params: &FracParams) -> f64 {
    params.sigma() * kstar_l2_norm(f, params.hurst()).expect("validated Hurst index")
}

/// Closed-form Ẇ^{s,2}(ℝ) norm of a step function:
/// ‖f‖² = −Σ_{m,n} J_m J_n |τ_m − τ_n|^{1−2s} / (2Γ(2−2s) cos πs).
pub fn sobolev_norm_step(f: &StepFunction, s: SobolevOrder) -> f64 {
    let s = s.value();
    let (taus, jumps) = f.jumps();
    let p = 1.0 - 2.0 * s;
    let mut acc = 0.0;
    for i in 0..taus.len() {
        for k in (i + 1)..taus.len() {
            acc += 2.0 * jumps[i] * jumps[k] * (taus[k] - taus[i]).powf(p);
        }
    }
    let norm_sq = -acc / (2.0 * gamma(2.0 - 2.0 * s) * (PI * s).cos());
    norm_sq.max(0.0).sqrt()
}

/// ‖f‖_{Ẇ^{s,2}(ℝ)} = ‖|x|^s f̂‖_{L²} of a piecewise-constant grid function,
/// computed from the FFT of the zero-padded cell values.
///
/// The cell shape factor makes |f̂(x)|² = |S(x)|² (2 − 2cos xh)/(2π x²) with
/// S the (2π/h)-periodic cell sum, so the integral over ℝ folds onto one
/// period against a Hurwitz-zeta weight. The folded integrand is smooth and
/// periodic except for |x|^{2s} at the origin; the trapezoid rule on the
/// FFT frequencies is corrected for that with the leading Navot terms and
/// extrapolated in the padding factor.
pub fn sobolev_norm_fourier(f: &GridFunction, s: SobolevOrder) -> f64 {
    let s = s.value();
    let n = f.values.len();
    if n == 0 || f.values.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let h = f.grid.dt();
    let coarse = folded_trapezoid(&f.values, h, s, 4);
    let fine = folded_trapezoid(&f.values, h, s, 8);
    let ratio = 2f64.powf(5.0 + 2.0 * s);
    let extrapolated = (ratio * fine - coarse) / (ratio - 1.0);
    extrapolated.max(0.0).sqrt()
}

fn folded_trapezoid(values: &[f64], h: f64, s: f64, pad: usize) -> f64 {
    let n = values.len();
    let p = n * pad;
    let mut buf: Vec<Complex<f64>> = values
        .iter()
        .map(|v| Complex::new(*v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(p)
        .collect();
    FftPlanner::new().plan_fft_forward(p).process(&mut buf);
    let period = 2.0 * PI / h;
    let dx = period / p as f64;
    let expo = 2.0 - 2.0 * s;
    let scale = period.powf(-expo) / (2.0 * PI);
    let mut trap = 0.0;
    for j in 1..=p / 2 {
        let q = j as f64 / p as f64;
        let x = dx * j as f64;
        let w = scale * (2.0 - 2.0 * (x * h).cos()) * (hurwitz_zeta(expo, q) + hurwitz_zeta(expo, 1.0 - q));
        let mirrored = p - j;
        let mut s2 = buf[j].norm_sqr();
        if mirrored != j {
            s2 += buf[mirrored].norm_sqr();
        }
        trap += s2 * w;
    }
    trap *= dx;
    // Navot corrections for the omitted |x|^{2s}φ(x) sample at the origin
    let sum: f64 = values.iter().sum();
    let (mut s1, mut s2) = (0.0, 0.0);
    for (i, v) in values.iter().enumerate() {
        let fi = i as f64;
        s1 += fi * v;
        s2 += fi * fi * v;
    }
    let second_moment = 2.0 * (sum * s2 - s1 * s1);
    let h2 = h * h;
    let phi0 = sum * sum * h2 / (2.0 * PI);
    let phi2 = (-h2 * h2 * second_moment - sum * sum * h2 * h2 / 6.0) / (2.0 * PI);
    trap - 2.0 * riemann_zeta(-2.0 * s) * phi0 * dx.powf(1.0 + 2.0 * s)
        - riemann_zeta(-2.0 * s - 2.0) * phi2 * dx.powf(3.0 + 2.0 * s)
}

/// ∫_{c0}^{c1}∫_{e0}^{e1} |x−y|^{−1−2s} dy dx for disjoint or adjacent
/// intervals; infinite `e` ends are allowed.
fn gagliardo_block(c0: f64, c1: f64, e0: f64, e1: f64, s: f64) -> f64 {
    let big = |x: f64| x.abs().powf(1.0 - 2.0 * s) / (-2.0 * s * (1.0 - 2.0 * s));
    let term = |e: f64, sign: f64| -> f64 {
        if e.is_infinite() {
            0.0
        } else {
            sign * (big(c1 - e) - big(c0 - e))
        }
    };
    -(term(e1, 1.0) + term(e0, -1.0))
}

/// Gagliardo–Slobodeckii seminorm (∫_T∫_T |f(x)−f(y)|²/|x−y|^{1+2s})^{1/2} of a
/// grid function extended by zero, for 0 < s < 1/2. On a bounded interval the
/// L²(T) term is added.
///
/// Each pair of cells is integrated exactly from the antiderivative of
/// |x−y|^{−1−2s}, which absorbs the diagonal singularity.
pub fn sobolev_norm_gagliardo(f: &GridFunction, s: SobolevOrder, domain: Domain) -> Result<f64> {
    let s = s.value();
    if !(s > 0.0) {
        return Err(Error::Domain {
            name: "s",
            value: s,
            range: "(0, 1/2)",
        });
    }
    let g = f.grid;
    let (lo, hi) = match domain {
        Domain::Line => (f64::NEG_INFINITY, f64::INFINITY),
        Domain::Interval(a, b) => {
            if a > g.start() + 1e-12 * g.dt() || b < g.end() - 1e-12 * g.dt() {
                return Err(Error::Invalid(format!(
                    "interval [{a}, {b}] does not contain the grid [{}, {}]",
                    g.start(),
                    g.end()
                )));
            }
            (a, b)
        }
    };
    let n = f.values.len();
    let mut total = 0.0;
    for i in 0..n {
        let (c0, c1) = (g.node(i), g.node(i + 1));
        let fi = f.values[i];
        for k in (i + 1)..n {
            let d = fi - f.values[k];
            if d != 0.0 {
                total += 2.0 * d * d * gagliardo_block(c0, c1, g.node(k), g.node(k + 1), s);
            }
        }
        if fi != 0.0 {
            let mut ext = 0.0;
            if lo < g.start() {
                ext += gagliardo_block(c0, c1, lo, g.start(), s);
            }
            if hi > g.end() {
                ext += gagliardo_block(c0, c1, g.end(), hi, s);
            }
            total += 2.0 * fi * fi * ext;
        }
    }
    if matches!(domain, Domain::Interval(..)) {
        total += f.l2_norm().powi(2);
    }
    Ok(total.max(0.0).sqrt())
}

/// σ²H(2H−1) ∫∫ f(u) g(v) |u−v|^{2H−2} du dv for H ∈ (1/2, 1), summed in
/// closed form over pairs of pieces.
pub fn dh_inner_singular(f: &StepFunction, g: &StepFunction, h: f64, sigma: f64) -> Result<f64> {
    if !(h > 0.5 && h < 1.0) {
        return Err(Error::Domain {
            name: "H",
            value: h,
            range: "(1/2, 1)",
        });
    }
    let p = 2.0 * h;
    let pw = |x: f64| x.abs().powf(p);
    let mut acc = 0.0;
    for (wf, vf) in f.breakpoints.windows(2).zip(&f.values) {
        for (wg, vg) in g.breakpoints.windows(2).zip(&g.values) {
            let (a, b, c, d) = (wf[0], wf[1], wg[0], wg[1]);
            // H(2H−1)∫_a^b∫_c^d |u−v|^{2H−2} = −½[|b−d|^p − |a−d|^p − |b−c|^p + |a−c|^p]
            let block = -0.5 * (pw(b - d) - pw(a - d) - pw(b - c) + pw(a - c));
            acc += vf * vg * block;
        }
    }
    Ok(sigma * sigma * acc)
}

/// ‖σ e^{−λ·} 1_{(0,t)}‖²_{D^H} for λ ≥ 0, in closed form.
///
/// Writing the kernel as a superposition of indicators 1_{[τ,∞)} with jump
/// measure δ₀ − λe^{−λτ}dτ − e^{−λt}δ_t and pairing by the covariance gives
/// e^{−λt}t^{2H} + ½λ^{−2H}γ(2H+1, λt) − ½λ e^{−2λt}∫₀ᵗ v^{2H} e^{λv} dv.
pub fn dh_norm_sq_exponential(rate: f64, horizon: f64, h: f64, sigma: f64) -> Result<f64> {
    check_hurst(h)?;
    if !(rate >= 0.0) || !(horizon >= 0.0) {
        return Err(Error::Invalid(format!(
            "exponential kernel needs rate ≥ 0 and horizon ≥ 0, got {rate}, {horizon}"
        )));
    }
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let p = 2.0 * h;
    let x = rate * horizon;
    let boundary = (-x).exp() * horizon.powf(p);
    if rate == 0.0 {
        return Ok(sigma * sigma * boundary);
    }
    let core = 0.5 * rate.powf(-p) * lower_gamma(p + 1.0, x);
    let cross = 0.5 * rate * damped_growth_moment(p + 1.0, rate, horizon);
    Ok(sigma * sigma * (boundary + core - cross).max(0.0))
}

/// ‖f‖²_{D^H} of a grid function via the Fourier route, C²_{σ,H}‖f‖²_{Ẇ^{1/2−H}}.
pub fn dh_norm_sq_grid(f: &GridFunction, h: f64, sigma: f64) -> Result<f64> {
    let c = c_sigma_h_constant(sigma, h)?;
    let s = SobolevOrder::from_hurst(h)?;
    Ok((c * sobolev_norm_fourier(f, s)).powi(2))
}

/// M_{a,r}: replaces a grid function by its averages over the cubes
/// a + r[k, k+1) that meet its support. The result lives on the grid of
/// those cubes.
pub fn averaging_operator(f: &GridFunction, a: f64, r: f64) -> Result<GridFunction> {
    if !(r > 0.0) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            range: "(0, ∞)",
        });
    }
    let g = f.grid;
    let k0 = ((g.start() - a) / r).floor();
    let k1 = ((g.end() - a) / r).ceil();
    let n = (k1 - k0).max(1.0) as usize;
    let out = TimeGrid::new(a + k0 * r, a + (k0 + n as f64) * r, n)?;
    let step = f.to_step_function();
    Ok(step.to_grid_function(out))
}

/// M_{a,r} on a step function. Only cubes containing a breakpoint differ from
/// f, so the result stays sparse for any r.
pub fn averaging_step(f: &StepFunction, a: f64, r: f64) -> Result<StepFunction> {
    if !(r > 0.0) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            range: "(0, ∞)",
        });
    }
    if f.values.is_empty() {
        return Ok(StepFunction::zero());
    }
    let mut cubes: Vec<f64> = f
        .breakpoints
        .iter()
        .map(|t| ((t - a) / r).floor())
        .collect();
    cubes.dedup();
    let mut bp: Vec<f64> = Vec::new();
    let mut vals: Vec<f64> = Vec::new();
    for k in cubes {
        let (q0, q1) = (a + k * r, a + (k + 1.0) * r);
        if let Some(last) = bp.last().copied() {
            if q0 > last {
                vals.push(f.eval(0.5 * (last + q0)));
                bp.push(q0);
            }
        } else {
            bp.push(q0);
        }
        let avg = f.restrict(q0, q1).lp_norm_signed_integral() / (q1 - q0);
        vals.push(avg);
        bp.push(q1);
    }
    StepFunction::new(bp, vals)
}

impl StepFunction {
    fn lp_norm_signed_integral(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (w[1] - w[0]) * v)
            .sum()
    }
}

/// (‖(F)_{a,b}‖_{Ẇ^{s,2}}, |a|^{s−1/2}‖F‖_{Ẇ^{s,2}}) where (F)_{a,b}(x) = F(ax+b).
///
/// The first entry goes through the K*_H quadrature with H = 1/2 − s, the
/// second through the closed form, so agreement is a genuine check.
pub fn affine_transform_norm_check(
    f: &StepFunction,
    a: f64,
    b: f64,
    s: SobolevOrder,
) -> Result<(f64, f64)> {
    let g = f.affine(a, b)?;
    let h = 0.5 - s.value();
    let direct = kstar_l2_norm(&g, h)? * c_h_constant(h)? / gamma(h + 0.5);
    let predicted = a.abs().powf(s.value() - 0.5) * sobolev_norm_step(f, s);
    Ok((direct, predicted))
}

/// ‖1_J F‖_{Ẇ^{s,2}} for J = [lo, hi).
pub fn restriction_norm(f: &StepFunction, lo: f64, hi: f64, s: SobolevOrder) -> Result<f64> {
    if !(hi > lo) {
        return Err(Error::Invalid(format!("empty interval [{lo}, {hi})")));
    }
    Ok(sobolev_norm_step(&f.restrict(lo, hi), s))
}
