//! One-dimensional quadrature: double-exponential rules for endpoint
//! singularities and half-line integrals, and (graded) Gauss–Legendre.

use std::f64::consts::FRAC_PI_2;

const TANH_SINH_TMAX: f64 = 6.0;
const EXP_SINH_TMAX: f64 = 6.7;
const MAX_LEVEL: u32 = 12;

/// Tanh–sinh quadrature of `f` over `(a, b)`.
///
/// `f` receives the distances `(x − a, b − x)` rather than `x`, so integrands
/// that are singular at an endpoint can be evaluated without cancellation.
/// Halves the step until successive estimates agree to `tol` (relative).
pub fn tanh_sinh<F: Fn(f64, f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // distance to the nearer endpoint, and the weight dx/dt
        let near = half * 2.0 * e / (1.0 + e);
        if near <= 0.0 {
            return 0.0;
        }
        let far = 2.0 * half - near;
        let w = half * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        let v = if t >= 0.0 { f(far, near) } else { f(near, far) };
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= TANH_SINH_TMAX {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut odd = 0.0;
        let mut j = 1;
        while j as f64 * h <= TANH_SINH_TMAX {
            let t = j as f64 * h;
            odd += eval(t) + eval(-t);
            j += 2;
        }
        sum += odd;
        let next = sum * h;
        let done = level >= 3 && (next - estimate).abs() <= tol * next.abs();
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// Exp–sinh quadrature of `f` over `(a, ∞)`.
///
/// `f` receives the distance `x − a`. `scale` sets where the transformed
/// nodes concentrate and should be of the order of the integrand's
/// characteristic length.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, scale: f64, tol: f64) -> f64 {
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let d = scale * u.exp();
        if d <= 0.0 || !d.is_finite() {
            return 0.0;
        }
        let w = FRAC_PI_2 * t.cosh() * d;
        let v = f(d);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };
    let mut h = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= EXP_SINH_TMAX {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut odd = 0.0;
        let mut j = 1;
        while j as f64 * h <= EXP_SINH_TMAX {
            let t = j as f64 * h;
            odd += eval(t) + eval(-t);
            j += 2;
        }
        sum += odd;
        let next = sum * h;
        let done = level >= 3 && (next - estimate).abs() <= tol * next.abs();
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 1 { x } else { p1 };
                let pm1 = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * p - pm1) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            if n == 1 {
                dp = 1.0;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(c + r * x))
            .sum::<f64>()
            * r
    }

    /// Composite rule on panels that halve in width towards `a`
    /// (mesh ratio 2), for integrands singular at `a`.
    pub fn graded<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, levels: u32) -> f64 {
        let len = b - a;
        let mut total = 0.0;
        let mut hi = b;
        for j in 1..=levels {
            let lo = a + len * 0.5f64.powi(j as i32);
            total += self.integrate(&f, lo, hi);
            hi = lo;
        }
        total + self.integrate(&f, a, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        // ∫₀¹ x^{-0.8} dx = 5
        let v = tanh_sinh(|da, _| da.powf(-0.8), 0.0, 1.0, 1e-12);
        assert!((v - 5.0).abs() < 1e-9, "{v}");
        // ∫₀¹ (1−x)^{-0.5} ln x ... use ∫₀¹ (1-x)^{-1/2} = 2
        let v = tanh_sinh(|_, db| db.powf(-0.5), 0.0, 1.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn exp_sinh_algebraic_tail() {
        // ∫₀^∞ (1+d)^{-2.2} dd = 1/1.2
        let v = exp_sinh(|d| (1.0 + d).powf(-2.2), 1.0, 1e-12);
        assert!((v - 1.0 / 1.2).abs() < 1e-9, "{v}");
        // ∫₀^∞ e^{-d} d^{-1/2} = √π
        let v = exp_sinh(|d| (-d).exp() / d.sqrt(), 1.0, 1e-12);
        assert!((v - std::f64::consts::PI.sqrt()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        let v = gl.integrate(|x| x.powi(15) + 3.0 * x.powi(6), -1.0, 2.0);
        let exact = (2f64.powi(16) - 1.0) / 16.0 + 3.0 * (2f64.powi(7) + 1.0) / 7.0;
        assert!((v - exact).abs() < 1e-10 * exact);
        let w: f64 = gl.weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
        assert_eq!(GaussLegendre::new(1).integrate(|x| x + 1.0, 0.0, 2.0), 4.0);
    }

    #[test]
    fn graded_rule_converges_on_singular_integrand() {
        let gl = GaussLegendre::new(12);
        let v = gl.graded(|x| x.powf(-0.5), 0.0, 1.0, 40);
        assert!((v - 2.0).abs() < 1e-5, "{v}");
    }
}
