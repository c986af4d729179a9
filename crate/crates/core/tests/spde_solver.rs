use fracwiener::convolution_spde::*;
use fracwiener::stats::{correlation, second_moment};
use fracwiener::{Error, FracParams, TimeGrid};

fn fbm(h: f64) -> FracParams {
    FracParams::fbm(h, 1.0).unwrap()
}

#[test]
fn single_mode_variance_in_wiener_case() {
    let model = build_spectral_model(1.0, 1, 8, 0.0, 2.0).unwrap();
    let grid = TimeGrid::unit(0.5, 256).unwrap();
    let ens = solve_mild(&model, &fbm(0.5), grid, 50_000, 0.0, &SolveOptions::new(3)).unwrap();
    let lam = model.eigenvalue(1);
    for r in [64, 128, 256] {
        let t = grid.node(r);
        let exact = (1.0 - (-2.0 * lam * t).exp()) / (2.0 * lam);
        let est = second_moment(&ens.mode_samples(1, r));
        assert!(est.z_score(exact).abs() <= 3.0, "t={t}: {est:?} vs {exact}");
    }
}

#[test]
fn mode_variance_matches_exponential_norm() {
    let model = build_spectral_model(1.0, 1, 8, 0.0, 2.0).unwrap();
    let grid = TimeGrid::unit(0.25, 512).unwrap();
    for h in [0.3, 0.7] {
        let params = fbm(h);
        let ens = solve_mild(&model, &params, grid, 20_000, 0.0, &SolveOptions::new(4)).unwrap();
        for k in [1, 3] {
            let exact = model.mode_norm(k, grid.end(), &params, 0.0).unwrap().powi(2);
            let est = second_moment(&ens.mode_samples(k, 512));
            assert!(est.z_score(exact).abs() <= 4.0, "H={h} k={k}: {est:?} vs {exact}");
        }
    }
}

#[test]
fn modes_are_independent() {
    let model = build_spectral_model(1.0, 1, 8, 0.0, 2.0).unwrap();
    let grid = TimeGrid::unit(0.2, 64).unwrap();
    let n = 20_000;
    let ens = solve_mild(&model, &fbm(0.6), grid, n, 0.0, &SolveOptions::new(5)).unwrap();
    for (a, b) in [(1, 2), (2, 5), (1, 8)] {
        let r = correlation(&ens.mode_samples(a, 64), &ens.mode_samples(b, 64));
        assert!(r.abs() * (n as f64).sqrt() <= 4.0, "({a},{b}): {r}");
    }
}

#[test]
fn parseval_matches_spatial_quadrature() {
    let model = build_spectral_model(2.0, 1, 12, 1.0, 2.0).unwrap();
    let grid = TimeGrid::unit(0.1, 32).unwrap();
    let ens = solve_mild(&model, &fbm(0.7), grid, 4, 0.1, &SolveOptions::new(6)).unwrap();
    let (xs, w) = model.spatial_nodes(96);
    let spectral = ens.l2_norm_sq(32);
    for (path, s) in spectral.iter().enumerate() {
        let direct: f64 = xs.iter().map(|x| w * ens.field(path, 32, *x).powi(2)).sum();
        assert!((direct - s).abs() < 1e-10 * s, "{direct} vs {s}");
    }
    let p2 = ens.lp_increment_norms(0, 32, 2.0);
    for (a, b) in p2.iter().zip(&spectral) {
        assert!((a * a - b).abs() < 1e-10 * b);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let model = build_spectral_model(1.0, 1, 8, 0.0, 2.0).unwrap();
    let grid = TimeGrid::unit(0.1, 32).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| solve_mild(&model, &fbm(0.4), grid, 64, 0.0, &SolveOptions::new(7)).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn refuses_divergent_fields() {
    let model = build_spectral_model(1.0, 1, 64, 0.0, 2.0).unwrap();
    let grid = TimeGrid::unit(0.1, 16).unwrap();
    let err = solve_mild(&model, &fbm(0.4), grid, 4, 0.3, &SolveOptions::new(1)).unwrap_err();
    assert!(matches!(err, Error::Diverged(_)), "{err:?}");
    assert!(solve_mild(&model, &fbm(0.4), grid, 4, 0.0, &SolveOptions::new(1)).is_ok());
}

#[test]
fn record_subset_matches_full_run() {
    let model = build_spectral_model(1.0, 1, 8, 0.0, 2.0).unwrap();
    let grid = TimeGrid::unit(0.1, 64).unwrap();
    let full = solve_mild(&model, &fbm(0.6), grid, 8, 0.0, &SolveOptions::new(8)).unwrap();
    let opts = SolveOptions::new(8).dyadic_record(&grid);
    assert_eq!(opts.record.as_deref(), Some(&[32, 33, 34, 36, 40, 48, 64][..]));
    let part = solve_mild(&model, &fbm(0.6), grid, 8, 0.0, &opts).unwrap();
    for (r, node) in part.record().iter().enumerate() {
        assert_eq!(part.mode_samples(3, r), full.mode_samples(3, *node));
    }
    let bad = SolveOptions {
        record: Some(vec![65]),
        ..SolveOptions::new(8)
    };
    assert!(solve_mild(&model, &fbm(0.6), grid, 8, 0.0, &bad).is_err());
}

#[test]
fn lipschitz_control_has_unit_slope() {
    let model = build_spectral_model(1.0, 1, 16, 0.0, 3.0).unwrap();
    let grid = TimeGrid::unit(1.0, 1024).unwrap();
    let record = SolveOptions::new(0).dyadic_record(&grid).record.unwrap();
    let ctl = MildSolutionEnsemble::deterministic_control(&model, grid, record);
    let fit = holder_exponent_estimate(&ctl, 3.0).unwrap();
    assert!((fit.slope - 1.0).abs() < 1e-9, "{}", fit.slope);
}

#[test]
fn holder_exponent_of_small_model() {
    // (d, m, H) = (1, 1, 0.4): the exponent should not fall below H − 1/4
    let model = build_spectral_model(1.0, 1, 16, 0.0, 2.0).unwrap();
    let dt = 0.25 / model.eigenvalue(16);
    let grid = TimeGrid::unit(256.0 * dt, 256).unwrap();
    let opts = SolveOptions::new(9).dyadic_record(&grid);
    let ens = solve_mild(&model, &fbm(0.4), grid, 2_000, 0.0, &opts).unwrap();
    let fit = holder_exponent_estimate(&ens, 2.0).unwrap();
    assert!(fit.slope > 0.15 - 0.05, "{fit:?}");
    assert!(fit.mean_norms.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn convolution_rule_weights() {
    // one step with λdt = 1: weights e^{−1} and (1 − e^{−1})/1
    let z = vec![0.0, 1.0];
    let (lam, dt) = (2.0, 0.5);
    let left = mode_convolution(&z, lam, dt, ConvolutionRule::LeftPoint)[1];
    let avg = mode_convolution(&z, lam, dt, ConvolutionRule::ExponentialCellAverage)[1];
    assert!((left - (-1.0f64).exp()).abs() < 1e-15);
    assert!((avg - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
}
