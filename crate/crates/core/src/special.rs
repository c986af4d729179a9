//! Special functions: gamma and beta wrappers, Hurwitz and Riemann zeta,
//! and incomplete exponential moments.

use statrs::function::gamma as sg;

/// Γ(x) for real `x`, including negative non-integers (reflection formula).
pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

/// B(a, b) = Γ(a)Γ(b)/Γ(a+b), analytically continued to negative
/// non-integer arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    gamma(a) * gamma(b) / gamma(a + b)
}

/// Lower incomplete gamma γ(a, x) = ∫₀ˣ v^{a−1} e^{−v} dv for a > 0, x ≥ 0.
pub fn lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    sg::gamma_lr(a, x) * gamma(a)
}

// B_2, B_4, ..., B_20
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta ζ(s, q) = Σ_{k≥0} (k+q)^{−s} for real s ≠ 1 and q > 0, by
/// Euler–Maclaurin summation (valid as analytic continuation for s < 1).
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(q > 0.0, "hurwitz_zeta needs q > 0");
    assert!((s - 1.0).abs() > 1e-14, "pole at s = 1");
    const N: usize = 16;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (k as f64 + q).powf(-s);
    }
    let a = N as f64 + q;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Σ_j B_{2j}/(2j)! · s(s+1)…(s+2j−2) · a^{−s−2j+1}
    let mut rising = s; // s(s+1)...(s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut pow = a.powf(-s - 1.0);
    let a2 = a * a;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * pow;
        sum += term;
        let jj = (j + 1) as f64;
        rising *= (s + 2.0 * jj - 1.0) * (s + 2.0 * jj);
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        pow /= a2;
    }
    sum
}

/// Riemann zeta ζ(s) for real s ≠ 1.
pub fn riemann_zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// e^{−2λt} ∫₀ᵗ v^{a−1} e^{λv} dv for a > 0, λ ≥ 0, t > 0.
///
/// Summed as a positive series in log space, so neither factor overflows.
pub fn damped_growth_moment(a: f64, lambda: f64, t: f64) -> f64 {
    let x = lambda * t;
    if x > 745.0 {
        return 0.0;
    }
    // t^a Σ_n x^n / (n! (a+n)) · e^{−2x}
    let lx = if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    let base = a * t.ln() - 2.0 * x;
    let mut sum = 0.0;
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let log_term = if n == 0 { 0.0 } else { nf * lx - ln_gamma(nf + 1.0) };
        let term = (log_term + base).exp() / (a + nf);
        sum += term;
        if nf > x && term <= 1e-17 * sum {
            break;
        }
        if n > 100_000 {
            break;
        }
        n += 1;
        if x == 0.0 {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn riemann_zeta_known_values() {
        assert!(close(riemann_zeta(2.0), PI * PI / 6.0, 1e-13));
        assert!(close(riemann_zeta(3.0), 1.202_056_903_159_594_3, 1e-13));
        assert!(close(riemann_zeta(0.0), -0.5, 1e-13));
        assert!(close(riemann_zeta(-1.0), -1.0 / 12.0, 1e-13));
        assert!(riemann_zeta(-2.0).abs() < 1e-13);
        assert!(close(riemann_zeta(0.5), -1.460_354_508_809_586_8, 1e-12));
        assert!(close(riemann_zeta(-2.5), 0.008_516_928_777_960_6, 1e-10));
    }

    #[test]
    fn hurwitz_zeta_half_shift() {
        // ζ(2, 1/2) = 3ζ(2)
        assert!(close(hurwitz_zeta(2.0, 0.5), PI * PI / 2.0, 1e-13));
        // ζ(s, q) = q^{-s} + ζ(s, q+1)
        for &(s, q) in &[(1.3, 1e-4), (2.7, 0.37), (1.05, 0.9)] {
            let lhs = hurwitz_zeta(s, q);
            let rhs = q.powf(-s) + hurwitz_zeta(s, q + 1.0);
            assert!(close(lhs, rhs, 1e-12), "{s} {q}");
        }
    }

    #[test]
    fn beta_continuation_matches_gamma_ratio() {
        // B(1, b) = 1/b even for b in (-1, 0)
        assert!(close(beta(1.0, -0.4), -2.5, 1e-12));
        assert!(close(beta(0.5, 0.5), PI, 1e-12));
    }

    #[test]
    fn damped_growth_moment_limits() {
        // λ = 0: ∫ v^{a−1} = t^a / a
        assert!(close(damped_growth_moment(1.6, 0.0, 2.0), 2f64.powf(1.6) / 1.6, 1e-13));
        // a = 1: e^{−2λt}(e^{λt}−1)/λ
        let (l, t) = (3.0f64, 0.7f64);
        let exact = (-2.0 * l * t).exp() * ((l * t).exp() - 1.0) / l;
        assert!(close(damped_growth_moment(1.0, l, t), exact, 1e-13));
        assert_eq!(damped_growth_moment(1.0, 1e4, 1.0), 0.0);
    }

    #[test]
    fn lower_gamma_matches_elementary_case() {
        // γ(1, x) = 1 − e^{−x}
        assert!(close(lower_gamma(1.0, 2.5), 1.0 - (-2.5f64).exp(), 1e-13));
        assert_eq!(lower_gamma(0.5, 0.0), 0.0);
    }
}
