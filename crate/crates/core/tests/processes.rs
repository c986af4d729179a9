use fracwiener::chaos_core::DiscreteIsonormal;
use fracwiener::frac_process::{
    covariance_rh, hermite_isonormal, holder_exponent_regression, simulate_cylindrical, simulate_fbm,
    simulate_fbm_with, simulate_hermite_k2, simulate_hermite_k2_with, simulate_scalar, FbmMethod,
    HermiteModel, HermiteOptions, HERMITE_WINDOW_FACTOR,
};
use fracwiener::stats::{jarque_bera_pvalue, ks_two_sample, mean_estimate, skewness};
use fracwiener::{FracParams, TimeGrid};

#[test]
fn fbm_terminal_variance() {
    let params = FracParams::fbm(0.75, 1.3).unwrap();
    let ens = simulate_fbm(&params, TimeGrid::unit(1.0, 16).unwrap(), 100_000, 5).unwrap();
    let est = ens.covariance(16, 16);
    assert!(est.z_score(1.69).abs() <= 3.0, "{est:?}");
}

#[test]
fn fbm_increment_variance_is_exact_at_half() {
    let params = FracParams::fbm(0.5, 2.0).unwrap();
    let grid = TimeGrid::unit(1.0, 8).unwrap();
    let ens = simulate_fbm(&params, grid, 40_000, 3).unwrap();
    for i in 0..8 {
        let inc = ens.increments(i, i + 1);
        let est = fracwiener::stats::second_moment(&inc);
        assert!(est.z_score(4.0 * grid.dt()).abs() < 4.0, "step {i}: {est:?}");
    }
}

#[test]
fn holder_regression_recovers_hurst() {
    for &h in &[0.2, 0.5, 0.8] {
        let params = FracParams::fbm(h, 1.0).unwrap();
        let grid = TimeGrid::unit(1.0, 1024).unwrap();
        let ens = simulate_fbm_with(&params, grid, 200, 17, FbmMethod::Circulant).unwrap();
        let est = holder_exponent_regression(&ens, 64).unwrap();
        assert!((est - h).abs() < 0.03, "H={h}: {est}");
    }
}

#[test]
fn circulant_and_cholesky_agree_in_law() {
    let params = FracParams::fbm(0.3, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 64).unwrap();
    let a = simulate_fbm_with(&params, grid, 20_000, 1, FbmMethod::Cholesky { jitter: 0.0 }).unwrap();
    let b = simulate_fbm_with(&params, grid, 20_000, 2, FbmMethod::Circulant).unwrap();
    for i in [8, 32, 64] {
        let (_, p) = ks_two_sample(&a.column(i), &b.column(i));
        assert!(p > 0.01, "node {i}: p={p}");
    }
}

#[test]
fn stationary_increments() {
    let params = FracParams::fbm(0.7, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 20).unwrap();
    let ens = simulate_fbm(&params, grid, 20_000, 8).unwrap();
    let lag = 3;
    let exact = (lag as f64 * grid.dt()).powf(1.4);
    for start in [0, 4, 8, 12, 16] {
        let est = fracwiener::stats::second_moment(&ens.increments(start, start + lag));
        assert!(est.z_score(exact).abs() <= 3.0, "start {start}: {est:?}");
    }
}

#[test]
fn rosenblatt_covariance_on_nine_points() {
    let params = FracParams::rosenblatt(0.75, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 12).unwrap();
    let iso = hermite_isonormal(&grid, 21).unwrap();
    let ens = simulate_hermite_k2(&params, grid, &iso, 40_000).unwrap();
    for i in [4, 8, 12] {
        for j in [4, 8, 12] {
            let est = ens.covariance(i, j);
            let exact = covariance_rh(grid.node(i), grid.node(j), 0.75);
            assert!(est.z_score(exact).abs() <= 4.0, "({i},{j}): {est:?} vs {exact}");
        }
    }
}

#[test]
fn rosenblatt_is_zero_at_origin_and_skewed() {
    let params = FracParams::rosenblatt(0.7, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 8).unwrap();
    let ens = simulate_scalar(&params, grid, 20_000, 4).unwrap();
    assert!(ens.column(0).iter().all(|v| *v == 0.0));
    let z1 = ens.column(8);
    assert!(skewness(&z1) > 0.5, "{}", skewness(&z1));
    assert!(mean_estimate(&z1).z_score(0.0).abs() < 4.0);

    let fbm = simulate_fbm(&FracParams::fbm(0.7, 1.0).unwrap(), grid, 20_000, 4).unwrap();
    assert!(jarque_bera_pvalue(&fbm.column(8)) > 0.01);
}

#[test]
fn rosenblatt_self_similarity() {
    let h = 0.8;
    let params = FracParams::rosenblatt(h, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 8).unwrap();
    let ens = simulate_scalar(&params, grid, 40_000, 12).unwrap();
    let c = 2f64.powf(2.0 * h);
    let d: Vec<f64> = ens
        .paths()
        .iter()
        .map(|z| z[8] * z[8] - c * z[4] * z[4])
        .collect();
    assert!(mean_estimate(&d).z_score(0.0).abs() <= 3.0);
}

#[test]
fn generalized_model_covariance_shape() {
    let params = FracParams::generalized(-1.2, -0.4, 2, 1.0).unwrap();
    let h = params.hurst();
    let grid = TimeGrid::unit(1.0, 32).unwrap();
    let model = HermiteModel::new(&params, grid, HERMITE_WINDOW_FACTOR, HermiteOptions::default()).unwrap();
    let mut worst: f64 = 0.0;
    for i in [8, 16, 24, 32] {
        for j in [8, 16, 24, 32] {
            let exact = covariance_rh(grid.node(i), grid.node(j), h);
            worst = worst.max((model.covariance(i, j) - exact).abs());
        }
    }
    assert!(worst < 0.02, "{worst}");
}

#[test]
fn generalized_refinement_knob_converges() {
    let params = FracParams::generalized(-1.2, 0.1, 2, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 16).unwrap();
    let coarse = HermiteModel::new(&params, grid, HERMITE_WINDOW_FACTOR, HermiteOptions::default()).unwrap();
    let fine_opts = HermiteOptions {
        refinement: 2,
        ..HermiteOptions::default()
    };
    let fine = HermiteModel::new(&params, grid, HERMITE_WINDOW_FACTOR, fine_opts).unwrap();
    for i in [4, 8, 12] {
        let (a, b) = (coarse.covariance(i, i), fine.covariance(i, i));
        assert!(((a - b) / b).abs() < 0.01, "node {i}: {a} vs {b}");
    }
}

#[test]
fn generalized_simulation_matches_model() {
    let params = FracParams::generalized(-1.3, -0.2, 2, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 8).unwrap();
    let iso = DiscreteIsonormal::over_window(1.0, 200.0, 8, 31).unwrap();
    let ens = simulate_hermite_k2_with(&params, grid, &iso, 40_000, HermiteOptions::default()).unwrap();
    let model = HermiteModel::new(&params, grid, 200.0, HermiteOptions::default()).unwrap();
    for (i, j) in [(4, 4), (4, 8), (8, 8)] {
        let est = ens.covariance(i, j);
        assert!(est.z_score(model.covariance(i, j)).abs() < 4.0, "({i},{j}): {est:?}");
    }
}

#[test]
fn cylindrical_components_are_independent() {
    let params = FracParams::fbm(0.6, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 10).unwrap();
    let ens = simulate_cylindrical(&params, grid, 3, 20_000, 77).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            for (i, j) in [(5, 5), (5, 10), (10, 10)] {
                let est = ens.cross_covariance(a, b, i, j);
                assert!(est.z_score(0.0).abs() <= 4.0, "({a},{b},{i},{j}): {est:?}");
            }
        }
    }

    let wiener = simulate_cylindrical(&FracParams::fbm(0.5, 1.0).unwrap(), grid, 2, 20_000, 78).unwrap();
    for comp in wiener.components() {
        let est = fracwiener::stats::second_moment(&comp.increments(3, 4));
        assert!(est.z_score(0.1).abs() < 4.0, "{est:?}");
    }
}

#[test]
fn single_component_cylinder_matches_scalar_law() {
    let params = FracParams::fbm(0.4, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 16).unwrap();
    let cyl = simulate_cylindrical(&params, grid, 1, 10_000, 5).unwrap();
    let scalar = simulate_fbm(&params, grid, 10_000, 6).unwrap();
    let (_, p) = ks_two_sample(&cyl.components()[0].column(16), &scalar.column(16));
    assert!(p > 0.01, "{p}");
}

#[test]
fn ensembles_round_trip_through_binary() {
    let params = FracParams::fbm(0.6, 1.0).unwrap();
    let grid = TimeGrid::unit(2.0, 5).unwrap();
    let ens = simulate_fbm(&params, grid, 3, 9).unwrap();
    let mut buf = Vec::new();
    ens.write_binary(&mut buf).unwrap();
    let (g, paths) = fracwiener::PathEnsemble::read_binary(buf.as_slice()).unwrap();
    assert_eq!(g, grid);
    assert_eq!(paths, ens.paths());

    let mut csv = Vec::new();
    ens.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("t,path_0,path_1,path_2\n"));
    assert_eq!(text.lines().count(), 7);
}
