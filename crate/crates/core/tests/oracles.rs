mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64;
use scatter2d_core::forward::{far_field, solve_scattered_field, synthesize_with_cache, KernelCache};
use scatter2d_core::geometry::unit_from_angle;
use scatter2d_core::special::{bessel_j0, bessel_y0, hankel_h0};
use scatter2d_core::*;

use common::{bessel_oracle, dense_solve, grid, rel_diff};

#[test]
fn bessel_matches_extended_precision_table() {
    for (x, j, y) in bessel_oracle() {
        let (gj, gy) = (bessel_j0(x).unwrap(), bessel_y0(x).unwrap());
        assert!((gj - j).abs() <= 1e-12 * 1f64.max(j.abs()), "J0({x}) = {gj}, table {j}");
        assert!((gy - y).abs() <= 1e-12 * 1f64.max(y.abs()), "Y0({x}) = {gy}, table {y}");
        assert_eq!(hankel_h0(x).unwrap(), Complex64::new(gj, gy));
    }
}

#[test]
fn default_tolerance_solve_tracks_dense_system() {
    let g = grid(16);
    let v = Phantom::AnnulusSquare.sample(g);
    let k = WaveNumber::new(3.0).unwrap();
    let kernel = PeriodizedKernel::build(g, k);
    let theta = unit_from_angle(2.0);
    let u = solve_scattered_field(&kernel, &v, theta, k, GmresOptions::default().tol).unwrap();
    assert!(rel_diff(u.values(), &dense_solve(&v, theta, 3.0)) < 1e-6);
}

#[test]
fn negative_wavenumber_solve_is_conjugate() {
    let g = grid(16);
    let v = Phantom::AnnulusSquare.sample(g);
    let theta = unit_from_angle(0.4);
    let solve = |k: f64| {
        let k = WaveNumber::new(k).unwrap();
        solve_scattered_field(&PeriodizedKernel::build(g, k), &v, theta, k, 1e-12).unwrap()
    };
    let plus = solve(2.5);
    let minus = solve(-2.5);
    let conj: Vec<Complex64> = plus.values().iter().map(|z| z.conj()).collect();
    assert!(rel_diff(minus.values(), &conj) < 1e-10);
}

#[test]
fn far_field_converges_under_refinement() {
    let k = WaveNumber::new(5.0).unwrap();
    let theta = [1.0, 0.0];
    let theta_out = unit_from_angle(2.0);
    let values: Vec<Complex64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| {
            let g = grid(n);
            let v = Phantom::Gaussian.sample(g);
            let kernel = PeriodizedKernel::build(g, k);
            let u_s = solve_scattered_field(&kernel, &v, theta, k, 1e-12).unwrap();
            let u = u_s.add(&forward::incident_field(g, theta, k)).unwrap();
            far_field(&v, &u, theta_out, k, 1.0).unwrap()
        })
        .collect();
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "Cauchy differences {diffs:?}");
}

#[test]
fn annulus_square_far_field_converges_under_refinement() {
    let k = WaveNumber::new(2.0).unwrap();
    let theta = [1.0, 0.0];
    let theta_out = unit_from_angle(1.0);
    let values: Vec<Complex64> = [16, 32, 64, 128]
        .iter()
        .map(|&n| {
            let g = grid(n);
            let v = Phantom::AnnulusSquare.sample(g);
            let u_s = solve_scattered_field(&PeriodizedKernel::build(g, k), &v, theta, k, 1e-12).unwrap();
            let u = u_s.add(&forward::incident_field(g, theta, k)).unwrap();
            far_field(&v, &u, theta_out, k, 1.0).unwrap()
        })
        .collect();
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]), "Cauchy differences {diffs:?}");
}

#[test]
fn exact_potential_is_nearly_a_fixed_point() {
    let g = grid(16);
    let v = Phantom::AnnulusSquare.sample(g);
    let s = ScatteringScenario::fixed_energy(100.0).unwrap();
    let d = synthesize_dataset(&v, &s, &ForwardOptions::with_tol(1e-12)).unwrap();
    let born = born_invert(&d).potential;
    let next = iterate_step(&v, &d, &IterateOptions::with_tol(1e-12)).unwrap();
    let e1 = l2_error(&born, &v).unwrap();
    let e2 = l2_error(&next, &v).unwrap();
    assert!(e2 < e1);
    assert!(e2 < 1e-9, "{e2}");
}

fn distinct_pairs(g: &GridSpec, s: &ScatteringScenario) -> usize {
    let key = |x: f64| if x == 0.0 { 0 } else { x.to_bits() };
    g.frequencies()
        .filter_map(|xi| s.experiment_params(xi))
        .map(|p| (key(p.theta_in[0]), key(p.theta_in[1]), key(p.k.get())))
        .collect::<BTreeSet<_>>()
        .len()
}

#[test]
fn solve_counts_match_distinct_experiments() {
    let g = grid(16);
    let v = Phantom::AnnulusSquare.sample(g);
    for s in [
        ScatteringScenario::fixed_energy(4.0).unwrap(),
        ScatteringScenario::fixed_angle(unit_from_angle(PI / 4.0)).unwrap(),
        ScatteringScenario::fixed_angle([0.0, 1.0]).unwrap(),
        ScatteringScenario::Backscattering,
    ] {
        let cache = KernelCache::new(g);
        let (d, stats) = synthesize_with_cache(&v, &s, &ForwardOptions::default(), &cache).unwrap();
        let expected = distinct_pairs(&g, &s);
        assert_eq!(stats.solves, expected, "{s}");
        let r = run(&d, 2, None, &IterateOptions::default()).unwrap();
        assert_eq!(r.stats.solves, expected, "{s}");
    }
}

#[test]
fn deduplicated_solves_equal_individual_solves() {
    let g = grid(16);
    let v = Phantom::AnnulusSquare.sample(g);
    let s = ScatteringScenario::fixed_angle([1.0, 0.0]).unwrap();
    let d = synthesize_dataset(&v, &s, &ForwardOptions::default()).unwrap();
    // (1, 3) and (1, -3) share theta and k
    for j in [(1, 3), (1, -3)] {
        let p = s.experiment_params(g.freq_coords(j).unwrap()).unwrap();
        let kernel = PeriodizedKernel::build(g, p.k);
        let u_s = solve_scattered_field(&kernel, &v, p.theta_in, p.k, GmresOptions::default().tol).unwrap();
        let u = u_s.add(&forward::incident_field(g, p.theta_in, p.k)).unwrap();
        let direct = far_field(&v, &u, p.theta_out, p.k, 1.0).unwrap();
        assert!((direct - d.get(j).unwrap()).norm() < 1e-9);
    }
}

#[test]
fn full_data_average_stays_close_to_each_angle() {
    let g = grid(32);
    let v = Phantom::AnnulusSquare.sample(g);
    let s = ScatteringScenario::full_data(vec![unit_from_angle(0.3), unit_from_angle(1.9)]).unwrap();
    let parts = synthesize_full_data(&v, &s, &ForwardOptions::default()).unwrap();
    let each: Vec<f64> = parts.iter().map(|d| l2_error(&born_invert(d).potential, &v).unwrap()).collect();
    let avg = born_full_data(&parts).unwrap();
    let err = l2_error(&avg.potential, &v).unwrap();
    assert!(err <= each.iter().cloned().fold(0.0, f64::max), "{err} vs {each:?}");
    assert_eq!(avg.per_angle_zero_filled.len(), 2);
    assert_eq!(avg.zero_filled_count, 1);
}

#[test]
fn noisy_dataset_file_round_trip() {
    let g = grid(16);
    let v = Phantom::AnnulusSquare.sample(g);
    let d = synthesize_dataset(&v, &ScatteringScenario::Backscattering, &ForwardOptions::default()).unwrap();
    let noisy = add_noise(&d, 0.05, 7).unwrap();
    let dir = std::env::temp_dir().join(format!("scatter2d-oracles-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("data.csv");
    noisy.write_csv(&path).unwrap();
    let back = FarFieldDataset::read_csv(&path).unwrap();
    assert_eq!(back, noisy);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), back.to_csv());
    assert!(back.to_csv().lines().nth(1).unwrap().ends_with("noise=0.05 seed=7"));
    std::fs::remove_dir_all(&dir).unwrap();
}
