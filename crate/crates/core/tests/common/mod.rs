//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use scatter2d_core::forward::cut_green;
use scatter2d_core::{GridSpec, NodalField, Point, WaveNumber};

/// `(x, J0(x), Y0(x))` rows from the extended-precision table.
pub fn bessel_oracle() -> Vec<(f64, f64, f64)> {
    let text = include_str!("../data/bessel_oracle.csv");
    text.lines()
        .skip(1)
        .map(|l| {
            let c: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            (c[0], c[1], c[2])
        })
        .collect()
}

/// The first 200 rows: log-spaced points on `[1e-4, 500]`.
pub fn bessel_log_points() -> Vec<(f64, f64, f64)> {
    bessel_oracle().into_iter().take(200).collect()
}

/// Dense direct solve of the collocation system
/// `u_i - sum_l h^2 K(x_i - x_l) V_l u_l = sum_l h^2 K(x_i - x_l) V_l exp(i k theta . x_l)`
/// with node differences wrapped onto the torus.
pub fn dense_solve(potential: &NodalField, theta: Point, k: f64) -> Vec<Complex64> {
    let grid = *potential.grid();
    let n = grid.n() as i32;
    let h = grid.h();
    let kk = WaveNumber::new(k).unwrap();
    let idx: Vec<(i32, i32)> = grid.indices().collect();
    let wrap = |d: i32| (d + n / 2).rem_euclid(n) - n / 2;
    let m = idx.len();
    let mut kmat = DMatrix::<Complex64>::zeros(m, m);
    for (i, a) in idx.iter().enumerate() {
        for (l, b) in idx.iter().enumerate() {
            let d = [wrap(a.0 - b.0) as f64 * h, wrap(a.1 - b.1) as f64 * h];
            kmat[(i, l)] = cut_green(kk, d) * (h * h) * potential.values()[l];
        }
    }
    let incident = DVector::from_iterator(
        m,
        idx.iter().map(|j| {
            let x = [j.0 as f64 * h, j.1 as f64 * h];
            Complex64::from_polar(1.0, k * (theta[0] * x[0] + theta[1] * x[1]))
        }),
    );
    let rhs = &kmat * incident;
    let a = DMatrix::<Complex64>::identity(m, m) - kmat;
    a.lu().solve(&rhs).expect("nonsingular").iter().copied().collect()
}

/// `h^2 sum_n v(x_n) exp(-2 pi i xi . x_n)` by direct summation.
pub fn direct_transform(v: &NodalField, xi: Point) -> Complex64 {
    let grid = v.grid();
    let h = grid.h();
    grid.nodes()
        .zip(v.values())
        .map(|(x, val)| val * Complex64::from_polar(h * h, -2.0 * PI * (xi[0] * x[0] + xi[1] * x[1])))
        .sum()
}

/// Relative `||a - b||_0 / ||b||_0` on raw vectors.
pub fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

pub fn grid(n: usize) -> GridSpec {
    GridSpec::new(2.1, n).unwrap()
}
