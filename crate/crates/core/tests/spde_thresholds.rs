use fracwiener::convolution_spde::*;
use fracwiener::quad::tanh_sinh;
use fracwiener::FracParams;
use std::f64::consts::PI;

fn fbm(h: f64) -> FracParams {
    FracParams::fbm(h, 1.0).unwrap()
}

#[test]
fn mode_norm_wiener_case() {
    let m = build_spectral_model(PI, 1, 8, 0.0, 2.0).unwrap();
    for k in [1, 3, 8] {
        let lam = m.eigenvalue(k);
        let t = 0.7;
        let v = m.mode_norm(k, t, &fbm(0.5), 0.0).unwrap();
        let exact = ((1.0 - (-2.0 * lam * t).exp()) / (2.0 * lam)).sqrt();
        assert!((v - exact).abs() < 1e-12 * exact);
    }
}

#[test]
fn mode_norm_small_rate_is_indicator() {
    for h in [0.2, 0.5, 0.8] {
        let v = mode_norm(1e-12, 2.0, &FracParams::fbm(h, 1.5).unwrap(), 0.0, 0.0).unwrap();
        let exact = 1.5 * 2f64.powf(h);
        assert!((v - exact).abs() < 1e-9 * exact);
    }
}

/// σ²H(2H−1)∫∫ e^{−λu} e^{−λv} |u−v|^{2H−2} du dv over (0,t)², σ = 1, by
/// nested double-exponential quadrature on the triangle v < u.
fn singular_bilinear(lam: f64, t: f64, h: f64) -> f64 {
    let q = 2.0 * h - 2.0;
    let triangle = tanh_sinh(
        |u, _| {
            let inner = tanh_sinh(|_, d| (-lam * (u - d)).exp() * d.powf(q), 0.0, u, 1e-12);
            (-lam * u).exp() * inner
        },
        0.0,
        t,
        1e-11,
    );
    2.0 * h * (2.0 * h - 1.0) * triangle
}

#[test]
fn mode_norm_matches_singular_bilinear_form() {
    for (lam, t) in [(1.0, 1.0), (9.0, 0.5), (0.3, 2.0)] {
        for h in [0.6, 0.75, 0.9] {
            let v = mode_norm(lam, t, &fbm(h), 0.0, 0.0).unwrap().powi(2);
            let oracle = singular_bilinear(lam, t, h);
            assert!((v - oracle).abs() < 1e-6 * oracle, "λ={lam} t={t} H={h}: {v} vs {oracle}");
        }
    }
}

#[test]
fn existence_examples() {
    let m1 = build_spectral_model(PI, 1, 256, 0.0, 2.0).unwrap();
    assert!(existence_report(&m1, &fbm(0.4), 0.0, 1.0).unwrap().finite);
    let r = existence_report(&m1, &fbm(0.4), 0.2, 1.0).unwrap();
    assert!(!r.finite, "{:?}", r.decay_exponent);
    let m2 = build_spectral_model(PI, 2, 256, 0.0, 2.0).unwrap();
    assert!(existence_report(&m2, &fbm(0.3), 0.0, 1.0).unwrap().finite);
}

#[test]
fn existence_sweep_flips_at_threshold() {
    for p in [1.5, 2.0, 3.0] {
        let m = build_spectral_model(PI, 1, 256, 0.0, p).unwrap();
        for h in [0.35, 0.4, 0.45] {
            let th = h - 0.25;
            for d in [-0.15, -0.1, -0.05, 0.05, 0.1] {
                let r = existence_report(&m, &fbm(h), th + d, 1.0).unwrap();
                assert_eq!(r.finite, d < 0.0, "p={p} H={h} α={} exp={}", th + d, r.decay_exponent);
            }
        }
    }
}

#[test]
fn smoothing_slopes() {
    for (m, k, alpha) in [(1, 256, 0.0), (1, 256, 0.5), (2, 64, 0.0), (1, 256, 0.25)] {
        for p in [2.0, 4.0] {
            let model = build_spectral_model(PI, m, k, 0.0, p).unwrap();
            let fit = semigroup_smoothing_exponent(&model, alpha).unwrap();
            let target = -1.0 / (4.0 * m as f64) - alpha;
            assert!((fit.slope - target).abs() < 0.05, "m={m} α={alpha} p={p}: {} vs {target}", fit.slope);
        }
    }
}

#[test]
fn neumann_integral_is_refinement_stable() {
    for (h, p) in [(0.6, 2.0), (0.75, 1.5), (0.9, 2.0), (0.5, 2.0)] {
        let cfg = NeumannKernelConfig::new(1.0, 0.5, h, p).unwrap();
        let r = neumann_boundary_integral(&cfg).unwrap();
        let n = r.refinement_trace.len();
        let last = r.refinement_trace[n - 1];
        let prev = r.refinement_trace[n - 2];
        assert!(!r.diverged && (last - prev).abs() < 0.01 * last, "H={h} p={p}");
        assert!(r.image_doubling_change < 0.005);
    }
}

#[test]
fn surrogate_threshold() {
    let div = neumann_surrogate_integral(&NeumannKernelConfig::new(1.0, 0.5, 0.6, 2.0).unwrap(), 2.0, 2.0).unwrap();
    assert!(div.diverged);
    let fin = neumann_surrogate_integral(&NeumannKernelConfig::new(1.0, 0.5, 0.9, 2.0).unwrap(), 2.0, 2.0).unwrap();
    assert!(!fin.diverged, "{:?}", fin.refinement_trace);
}

#[test]
fn neumann_value_vanishes_with_horizon() {
    let mut prev = f64::INFINITY;
    for t0 in [0.5, 0.1, 0.02, 0.004] {
        let v = neumann_boundary_integral(&NeumannKernelConfig::new(1.0, t0, 0.75, 2.0).unwrap())
            .unwrap()
            .value;
        assert!(v < prev);
        prev = v;
    }
    assert!(prev < 0.05);
}
