use fracwiener::chaos_core::{moment_ratio, ChaosSample};
use fracwiener::frac_process::{simulate_cylindrical, simulate_fbm, simulate_scalar};
use fracwiener::rng::substream;
use fracwiener::sobolev::dh_norm_kstar;
use fracwiener::stats::{correlation, mean_estimate};
use fracwiener::wiener_integral::*;
use fracwiener::{FracParams, StepFunction, TimeGrid};
use proptest::prelude::*;
use rand::Rng;

/// Step function with breakpoints on the nodes of `grid`.
fn random_grid_step(rng: &mut impl Rng, grid: &TimeGrid) -> StepFunction {
    let n = grid.n_steps();
    let mut idx: Vec<usize> = (0..rng.random_range(2..=6)).map(|_| rng.random_range(0..=n)).collect();
    idx.sort_unstable();
    idx.dedup();
    if idx.len() < 2 {
        idx = vec![0, n];
    }
    let bp = idx.iter().map(|&i| grid.node(i)).collect();
    let vals = (1..idx.len()).map(|_| rng.random_range(-2.0..2.0)).collect();
    StepFunction::new(bp, vals).unwrap()
}

#[test]
fn fbm_isometry_for_random_integrands() {
    let params = FracParams::fbm(0.3, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 32).unwrap();
    let ens = simulate_fbm(&params, grid, 100_000, 10).unwrap();
    let mut rng = substream(10, 1);
    for _ in 0..5 {
        let f = random_grid_step(&mut rng, &grid);
        let rep = isometry_report(&f, &ens).unwrap();
        assert!(rep.z_score.abs() <= 3.0, "{rep:?}");
        let res = elementary_integral(&f, &ens).unwrap();
        assert!(res.mean().z_score(0.0).abs() <= 4.0);
        assert!(res.snapped.is_empty());
    }
}

#[test]
fn rosenblatt_isometry() {
    let grid = TimeGrid::unit(1.0, 16).unwrap();
    let params = FracParams::rosenblatt(0.7, 1.5).unwrap();
    let ens = simulate_scalar(&params, grid, 60_000, 11).unwrap();
    let one = isometry_report(&StepFunction::indicator(0.0, 1.0).unwrap(), &ens).unwrap();
    assert!((one.dh_norm_sq - 2.25).abs() < 1e-9);
    assert!(one.z_score.abs() <= 3.0, "{one:?}");
    let mut rng = substream(11, 1);
    for _ in 0..3 {
        let rep = isometry_report(&random_grid_step(&mut rng, &grid), &ens).unwrap();
        assert!(rep.z_score.abs() <= 3.0, "{rep:?}");
    }
}

#[test]
fn zero_integrand_report() {
    let grid = TimeGrid::unit(1.0, 8).unwrap();
    let ens = simulate_fbm(&FracParams::fbm(0.6, 1.0).unwrap(), grid, 10, 1).unwrap();
    let rep = isometry_report(&StepFunction::zero(), &ens).unwrap();
    assert_eq!((rep.mc_var, rep.dh_norm_sq, rep.z_score), (0.0, 0.0, 0.0));
    let json = serde_json::to_value(rep).unwrap();
    assert!(json.get("z_score").is_some());
}

#[test]
fn snapping_is_reported() {
    let grid = TimeGrid::unit(1.0, 10).unwrap();
    let ens = simulate_fbm(&FracParams::fbm(0.6, 1.0).unwrap(), grid, 4, 1).unwrap();
    let f = StepFunction::indicator(0.0, 0.52).unwrap();
    let res = elementary_integral(&f, &ens).unwrap();
    assert_eq!(res.snapped, vec![(0.52, 0.5)]);
    assert_eq!(res.f, StepFunction::indicator(0.0, 0.5).unwrap());
}

#[test]
fn chaos_two_integrals_satisfy_moment_bound() {
    let grid = TimeGrid::unit(1.0, 16).unwrap();
    let ens = simulate_scalar(&FracParams::rosenblatt(0.8, 1.0).unwrap(), grid, 40_000, 12).unwrap();
    let mut rng = substream(12, 1);
    for _ in 0..10 {
        let res = elementary_integral(&random_grid_step(&mut rng, &grid), &ens).unwrap();
        let r = moment_ratio(&ChaosSample::new(res.samples, 2), 4.0, 2.0).unwrap();
        assert!(r > 1.0 && r <= 3.0, "{r}");
    }
}

#[test]
fn cylindrical_orthogonal_columns_add_up() {
    let k = 4;
    let params = FracParams::fbm(0.65, 0.8).unwrap();
    let grid = TimeGrid::unit(1.0, 16).unwrap();
    let ens = simulate_cylindrical(&params, grid, k, 40_000, 13).unwrap();
    let a = HsOperator::new(vec![StepFunction::indicator(0.0, 1.0).unwrap(); k]).unwrap();
    let res = cylindrical_integral(&a, &ens).unwrap();
    let exact = k as f64 * 0.64;
    assert!((res.hs_norm_sq - exact).abs() < 1e-9);
    assert!(res.second_moment().z_score(exact).abs() <= 4.0);
    assert_eq!(res.partial_hs_norms_sq.len(), k);

    let mut cols = vec![StepFunction::zero(); k];
    cols[2] = StepFunction::new(vec![0.25, 0.5, 1.0], vec![1.0, -0.5]).unwrap();
    let single = cylindrical_integral(&HsOperator::new(cols.clone()).unwrap(), &ens).unwrap();
    let direct = elementary_integral(&cols[2], &ens.components()[2]).unwrap();
    assert_eq!(single.samples, direct.samples);

    let wrong = HsOperator::new(cols[..2].to_vec()).unwrap();
    assert!(cylindrical_integral(&wrong, &ens).is_err());
}

#[test]
fn cylindrical_truncation_tail() {
    let params = FracParams::fbm(0.4, 1.0).unwrap();
    let column = |k: usize| StepFunction::indicator(0.0, 0.5).unwrap().scale(0.6f64.powi(k as i32));
    let small = HsOperator::new((0..4).map(column).collect()).unwrap();
    let big = HsOperator::new((0..8).map(column).collect()).unwrap();
    let tail = geometric_tail(&small.partial_hs_norms_sq(&params));
    let change = big.hs_norm_sq(&params) - small.hs_norm_sq(&params);
    assert!(change > 0.0 && change <= tail * (1.0 + 1e-9), "{change} vs {tail}");
}

#[test]
fn orthogonal_directions_are_uncorrelated() {
    let params = FracParams::fbm(0.7, 1.0).unwrap();
    let grid = TimeGrid::unit(1.0, 16).unwrap();
    let n = 40_000;
    let ens = simulate_cylindrical(&params, grid, 2, n, 14).unwrap();
    let g1 = StepFunction::new(vec![0.0, 0.5, 1.0], vec![1.0, 2.0]).unwrap();
    let g2 = StepFunction::indicator(0.25, 0.75).unwrap();
    let a = elementary_integral(&g1, &ens.components()[0]).unwrap();
    let b = elementary_integral(&g2, &ens.components()[1]).unwrap();
    let r = correlation(&a.samples, &b.samples);
    assert!(r.abs() * (n as f64).sqrt() <= 4.0, "{r}");
}

#[test]
fn gamma_norm_examples() {
    let params = FracParams::fbm(0.35, 1.3).unwrap();
    let ind = StepFunction::indicator(0.0, 0.8).unwrap();
    let single = LpKernelField::new(vec![0.5], vec![1.0], vec![vec![ind.clone()]], 3.0, params).unwrap();
    assert!((gamma_norm_lp(&single) - 1.3 * 0.8f64.powf(0.35)).abs() < 1e-7);

    let a0 = vec![ind.clone(), StepFunction::indicator(0.2, 0.5).unwrap()];
    let norm_a0 = a0.iter().map(|c| dh_norm_kstar(c, &params).powi(2)).sum::<f64>().sqrt();
    let nodes: Vec<f64> = (0..5).map(|i| 0.1 + 0.2 * i as f64).collect();
    let constant = LpKernelField::new(nodes.clone(), vec![0.2; 5], vec![a0; 5], 1.5, params).unwrap();
    assert!((gamma_norm_lp(&constant) - norm_a0).abs() < 1e-9);

    let wiener = FracParams::fbm(0.5, 1.0).unwrap();
    let orth = vec![StepFunction::indicator(0.0, 1.0).unwrap(), StepFunction::indicator(1.0, 2.0).unwrap()];
    let field = LpKernelField::new(nodes, vec![0.2; 5], vec![orth; 5], 2.0, wiener).unwrap();
    for v in field.pointwise_norms() {
        assert!((v - 2f64.sqrt()).abs() < 1e-9);
    }
    assert!(LpKernelField::new(vec![0.0], vec![1.0], vec![vec![ind]], 0.5, params).is_err());
}

#[test]
fn gamma_norm_ratio_is_stable_under_refinement() {
    let params = FracParams::fbm(0.6, 1.0).unwrap();
    let field = |n: usize| {
        let nodes: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let kernels = nodes
            .iter()
            .map(|&x| vec![StepFunction::indicator(0.0, 0.2 + x).unwrap()])
            .collect();
        LpKernelField::new(nodes, vec![1.0 / n as f64; n], kernels, 3.0, params).unwrap()
    };
    let (a, b, c) = (gamma_norm_lp(&field(32)), gamma_norm_lp(&field(64)), gamma_norm_lp(&field(128)));
    assert!(((b - a) / (c - b)).abs() > 3.0, "midpoint rule converges at second order");
    assert!((c - b).abs() < 1e-4 * c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn integral_is_linear_pathwise(seed in 0u64..1000, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let grid = TimeGrid::unit(1.0, 16).unwrap();
        let ens = simulate_fbm(&FracParams::fbm(0.45, 1.0).unwrap(), grid, 8, seed).unwrap();
        let mut rng = substream(seed, 99);
        let f = random_grid_step(&mut rng, &grid);
        let g = random_grid_step(&mut rng, &grid);
        let lhs = elementary_integral(&f.linear_combination(alpha, &g, beta), &ens).unwrap();
        let a = elementary_integral(&f, &ens).unwrap();
        let b = elementary_integral(&g, &ens).unwrap();
        for p in 0..8 {
            let rhs = alpha * a.samples[p] + beta * b.samples[p];
            prop_assert!((lhs.samples[p] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn indicator_integral_is_path_value(seed in 0u64..1000, i in 1usize..=16) {
        let grid = TimeGrid::unit(2.0, 16).unwrap();
        let ens = simulate_fbm(&FracParams::fbm(0.8, 1.0).unwrap(), grid, 5, seed).unwrap();
        let res = elementary_integral(&StepFunction::indicator(0.0, grid.node(i)).unwrap(), &ens).unwrap();
        prop_assert_eq!(res.samples, ens.column(i));
        prop_assert!(mean_estimate(&ens.column(0)).value == 0.0);
    }
}
