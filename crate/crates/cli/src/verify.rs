use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use scatter2d_core::forward::{cut_green, solve_scattered_field};
use scatter2d_core::geometry::unit_from_angle;
use scatter2d_core::special::{bessel_j0, bessel_y0};
use scatter2d_core::*;

use crate::VerifyFailed;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

pub fn run(suite: &str) -> anyhow::Result<()> {
    let mut checks = vec![];
    if matches!(suite, "geometry" | "all") {
        checks.push(geometry()?);
    }
    if matches!(suite, "special" | "all") {
        checks.extend(special()?);
    }
    if matches!(suite, "solver" | "all") {
        checks.push(solver()?);
    }
    if matches!(suite, "sampling" | "all") {
        checks.extend(sampling()?);
    }
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.pass);
    }
    if failed > 0 {
        return Err(VerifyFailed(failed).into());
    }
    Ok(())
}

/// Low-discrepancy points of the unit square (R2 sequence).
fn quasi_random(count: usize) -> impl Iterator<Item = Point> {
    let g = 1.324_717_957_244_746f64;
    let (a1, a2) = (1.0 / g, 1.0 / (g * g));
    (1..=count).map(move |i| [(0.5 + a1 * i as f64).fract(), (0.5 + a2 * i as f64).fract()])
}

fn geometry() -> anyhow::Result<Check> {
    let scenarios = [
        ScatteringScenario::fixed_energy(10.0)?,
        ScatteringScenario::fixed_energy(100.0)?,
        ScatteringScenario::fixed_angle(unit_from_angle(PI / 4.0))?,
        ScatteringScenario::fixed_angle([0.0, -1.0])?,
        ScatteringScenario::Backscattering,
    ];
    let mut worst = 0.0f64;
    let mut count = 0;
    for s in &scenarios {
        for u in quasi_random(2000) {
            let xi = [40.0 * u[0] - 20.0, 40.0 * u[1] - 20.0];
            let Some(p) = s.experiment_params(xi) else {
                if s.in_omega(xi) {
                    return Ok(Check { name: "geometry", pass: false, detail: format!("{s}: no experiment at {xi:?} in Omega") });
                }
                continue;
            };
            let k = p.k.get();
            let d0 = k * (p.theta_out[0] - p.theta_in[0]) - 2.0 * PI * xi[0];
            let d1 = k * (p.theta_out[1] - p.theta_in[1]) - 2.0 * PI * xi[1];
            worst = worst.max(d0.hypot(d1) / 1f64.max(2.0 * PI * xi[0].hypot(xi[1])));
            for v in [p.theta_in, p.theta_out] {
                worst = worst.max((v[0].hypot(v[1]) - 1.0).abs());
            }
            count += 1;
        }
    }
    Ok(Check { name: "geometry", pass: worst <= 1e-10, detail: format!("{count} experiments, max residual {worst:.2e}") })
}

fn special() -> anyhow::Result<Vec<Check>> {
    // (x, J0(x), Y0(x)) from standard tables
    let table = [
        (1.0, 0.765_197_686_557_966_6, 0.088_256_964_215_676_96),
        (10.0, -0.245_935_764_451_348_3, 0.055_671_167_283_599_39),
    ];
    let mut worst = 0.0f64;
    for (x, j, y) in table {
        worst = worst.max((bessel_j0(x)? - j).abs()).max((bessel_y0(x)? - y).abs());
    }
    worst = worst.max(bessel_j0(2.404_825_557_695_773)?.abs());
    let mut worst_w = 0.0f64;
    for x in [0.01f64, 0.3, 2.0, 7.9, 8.1, 24.9, 25.1, 120.0] {
        let d = (1e-3 * x).min(1e-2);
        let diff = |f: fn(f64) -> scatter2d_core::Result<f64>| -> scatter2d_core::Result<f64> {
            Ok((f(x - 2.0 * d)? - 8.0 * f(x - d)? + 8.0 * f(x + d)? - f(x + 2.0 * d)?) / (12.0 * d))
        };
        let w = bessel_j0(x)? * diff(bessel_y0)? - diff(bessel_j0)? * bessel_y0(x)?;
        worst_w = worst_w.max((w * PI * x / 2.0 - 1.0).abs());
    }
    Ok(vec![
        Check { name: "special values", pass: worst <= 1e-14, detail: format!("max error {worst:.2e}") },
        Check { name: "special wronskian", pass: worst_w <= 1e-8, detail: format!("max relative residual {worst_w:.2e}") },
    ])
}

/// Dense LU solve of the collocation system on the torus.
fn dense_solve(v: &NodalField, theta: Point, k: WaveNumber) -> Vec<Complex64> {
    let grid = *v.grid();
    let n = grid.n() as i32;
    let h = grid.h();
    let idx: Vec<Index> = grid.indices().collect();
    let wrap = |d: i32| (d + n / 2).rem_euclid(n) - n / 2;
    let m = idx.len();
    let kmat = DMatrix::from_fn(m, m, |i, l| {
        let d = [wrap(idx[i].0 - idx[l].0) as f64 * h, wrap(idx[i].1 - idx[l].1) as f64 * h];
        cut_green(k, d) * (h * h) * v.values()[l]
    });
    let incident = DVector::from_iterator(
        m,
        idx.iter().map(|j| {
            let x = [j.0 as f64 * h, j.1 as f64 * h];
            Complex64::from_polar(1.0, k.get() * (theta[0] * x[0] + theta[1] * x[1]))
        }),
    );
    let rhs = &kmat * incident;
    let a = DMatrix::<Complex64>::identity(m, m) - kmat;
    a.lu().solve(&rhs).expect("nonsingular").iter().copied().collect()
}

fn solver() -> anyhow::Result<Check> {
    let g = GridSpec::new(2.1, 16)?;
    let v = Phantom::AnnulusSquare.sample(g);
    let mut worst = 0.0f64;
    for k in [1.0, 2.0, PI] {
        let k = WaveNumber::new(k)?;
        let kernel = PeriodizedKernel::build(g, k);
        for theta in [[1.0, 0.0], unit_from_angle(0.7)] {
            let u = solve_scattered_field(&kernel, &v, theta, k, 1e-13)?;
            let dense = dense_solve(&v, theta, k);
            let num: f64 = u.values().iter().zip(&dense).map(|(a, b)| (a - b).norm_sqr()).sum();
            let den: f64 = dense.iter().map(|b| b.norm_sqr()).sum();
            worst = worst.max((num / den).sqrt());
        }
    }
    Ok(Check { name: "solver", pass: worst <= 1e-8, detail: format!("N=16 against dense LU, max relative difference {worst:.2e}") })
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (PI * t).sin() / (PI * t)
    }
}

/// A trigonometric polynomial on the cell; its samples are exact.
pub fn trig_study(r: f64, ns: &[usize]) -> scatter2d_core::Result<SamplingStudy> {
    let terms: [((i32, i32), Complex64); 3] = [
        ((0, 0), Complex64::new(0.5, 0.0)),
        ((3, -2), Complex64::new(0.2, -0.1)),
        ((-5, 4), Complex64::new(-0.3, 0.25)),
    ];
    let q = |x: Point| -> Complex64 {
        terms
            .iter()
            .map(|(m, a)| a * Complex64::from_polar(1.0, PI * (m.0 as f64 * x[0] + m.1 as f64 * x[1]) / r))
            .sum()
    };
    let g = |xi: Point| -> Complex64 {
        let j = ((xi[0] * 2.0 * r).round() as i32, (xi[1] * 2.0 * r).round() as i32);
        terms.iter().find(|(m, _)| *m == j).map_or(Complex64::new(0.0, 0.0), |(_, a)| a * (4.0 * r * r))
    };
    sampling_study(r, ns, 0, q, g)
}

/// The tensor hat function, whose transform is a squared sinc.
pub fn hat_study(r: f64, ns: &[usize]) -> scatter2d_core::Result<SamplingStudy> {
    let hat = |x: Point| Complex64::new((1.0 - x[0].abs()).max(0.0) * (1.0 - x[1].abs()).max(0.0), 0.0);
    let hat_hat = |xi: Point| Complex64::new((sinc(xi[0]) * sinc(xi[1])).powi(2), 0.0);
    sampling_study(r, ns, 1, hat, hat_hat)
}

fn sampling() -> anyhow::Result<Vec<Check>> {
    let ns = [16, 32, 64, 128];
    let trig = trig_study(2.1, &ns)?;
    let worst = trig.errors.iter().map(|e| e.2).fold(0.0, f64::max);
    let hat = hat_study(2.1, &ns)?;
    let order = hat.order.as_ref().map_or(f64::NAN, |f| f.exponent);
    Ok(vec![
        Check { name: "sampling trig", pass: worst <= 1e-12, detail: format!("max error {worst:.2e}") },
        Check { name: "sampling hat", pass: order >= 1.4, detail: format!("fitted order {order:.3}") },
    ])
}
